#include "crnstab/parse.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace crnstab {

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

/// Cursor over one line with 1-based error positions.
class LineScanner {
public:
    LineScanner(std::string_view line, int lineno) : line_(line), lineno_(lineno) {}

    void skip_ws() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= line_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < line_.size() ? line_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) { ++pos_; return true; }
        return false;
    }
    bool accept(std::string_view word) {
        skip_ws();
        if (line_.substr(pos_).substr(0, word.size()) == word) {
            pos_ += word.size();
            return true;
        }
        return false;
    }
    void expect(char c, const std::string& what) {
        if (!accept(c)) fail("expected '" + std::string(1, c) + "' " + what);
    }

    std::string name() {
        skip_ws();
        if (pos_ >= line_.size() || !name_start(line_[pos_])) fail("expected species name");
        std::size_t start = pos_;
        while (pos_ < line_.size() && name_char(line_[pos_])) ++pos_;
        return std::string(line_.substr(start, pos_ - start));
    }

    bool at_number() {
        char c = peek();
        return digit(c) || c == '.' || c == '-' || c == '+';
    }

    Rational number() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < line_.size() && (line_[pos_] == '-' || line_[pos_] == '+')) ++pos_;
        while (pos_ < line_.size() &&
               (digit(line_[pos_]) || line_[pos_] == '.' || line_[pos_] == '/' ||
                line_[pos_] == 'e' || line_[pos_] == 'E' ||
                ((line_[pos_] == '-' || line_[pos_] == '+') && pos_ > start &&
                 (line_[pos_ - 1] == 'e' || line_[pos_ - 1] == 'E'))))
            ++pos_;
        if (pos_ == start) fail("expected number");
        try {
            return parse_number(line_.substr(start, pos_ - start));
        } catch (const Error& e) {
            pos_ = start;
            fail(e.what());
        }
        return Rational(0);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, lineno_, static_cast<int>(pos_) + 1);
    }

    int lineno() const { return lineno_; }

private:
    std::string_view line_;
    int lineno_;
    std::size_t pos_ = 0;
};

struct RawTerm {
    Rational coeff;
    std::string species;
};

std::vector<RawTerm> parse_complex_terms(LineScanner& sc) {
    std::vector<RawTerm> terms;
    // A bare "0" is the zero complex.
    if (sc.peek() == '0') {
        LineScanner probe = sc;
        probe.accept('0');
        char next = probe.peek();
        if (!name_start(next) && next != '.' && !digit(next) && next != '/') {
            sc = probe;
            return terms;
        }
    }
    for (;;) {
        Rational coeff(1);
        if (sc.at_number()) coeff = sc.number();
        terms.push_back({coeff, sc.name()});
        if (!sc.accept('+')) break;
    }
    return terms;
}

}  // namespace

Rational parse_number(std::string_view text) {
    if (text.empty()) throw Error("empty number");
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
        neg = text[pos] == '-';
        ++pos;
    }

    auto read_int = [&](const char* what) -> long long {
        if (pos >= text.size() || !digit(text[pos])) throw Error(std::string("expected digits in ") + what);
        long long v = 0;
        int n = 0;
        while (pos < text.size() && digit(text[pos])) {
            if (++n > 18) throw Error("numeric literal too long");
            v = v * 10 + (text[pos] - '0');
            ++pos;
        }
        return v;
    };

    long long ip = 0;
    bool has_int = pos < text.size() && digit(text[pos]);
    if (has_int) ip = read_int("number");

    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        if (!has_int) throw Error("bad fraction");
        long long q = read_int("denominator");
        if (pos != text.size()) throw Error("trailing characters after fraction");
        if (q == 0) throw Error("zero denominator");
        Rational r(ip, q);
        return neg ? -r : r;
    }

    Rational r(ip);
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        long long frac = 0, scale = 1;
        int n = 0;
        while (pos < text.size() && digit(text[pos])) {
            if (++n > 15) throw Error("numeric literal too long");
            frac = frac * 10 + (text[pos] - '0');
            scale *= 10;
            ++pos;
        }
        if (n == 0 && !has_int) throw Error("bad number");
        r = r + Rational(frac, scale);
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            eneg = text[pos] == '-';
            ++pos;
        }
        long long e = read_int("exponent");
        if (e > 18) throw Error("exponent out of range");
        r = r * Rational(10).pow(eneg ? -e : e);
    }
    if (pos != text.size()) throw Error("trailing characters in number");
    return neg ? -r : r;
}

Network parse_network(std::string_view text) {
    Network net;
    bool strict_species = false;
    std::map<std::string, int> index;

    auto intern = [&](const std::string& name, LineScanner& sc) -> int {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        if (strict_species)
            sc.fail("unknown species '" + name + "' (not in species header)");
        int id = static_cast<int>(net.species.size());
        net.species.push_back(name);
        index.emplace(name, id);
        return id;
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        LineScanner sc(raw, lineno);
        if (sc.done()) continue;

        if (sc.accept("species:")) {
            if (strict_species || !net.species.empty())
                sc.fail("species header must come first and appear once");
            strict_species = true;
            for (;;) {
                std::string name = sc.name();
                if (index.count(name)) sc.fail("duplicate species '" + name + "'");
                index.emplace(name, static_cast<int>(net.species.size()));
                net.species.push_back(name);
                if (!sc.accept(',')) break;
            }
            if (!sc.done()) sc.fail("unexpected trailing input after species header");
            continue;
        }

        std::vector<RawTerm> lhs = parse_complex_terms(sc);
        sc.expect('-', "before '>'");
        sc.expect('>', "in reaction arrow");
        std::vector<RawTerm> rhs = parse_complex_terms(sc);
        sc.expect(':', "before rate");
        if (!sc.accept("k=")) sc.fail("expected 'k=' (rate is required)");
        Rational rate = sc.number();
        Rational delay(0);
        if (sc.accept(',')) {
            if (!sc.accept("tau=")) sc.fail("expected 'tau='");
            delay = sc.number();
        }
        if (!sc.done()) sc.fail("unexpected trailing input");

        if (!rate.positive()) sc.fail("non-positive rate");
        if (delay.negative()) sc.fail("negative delay");

        // Resolve names first so both complexes see any species new to this line.
        std::vector<std::pair<int, Rational>> l, p;
        for (const RawTerm& t : lhs) {
            if (t.coeff.negative()) sc.fail("negative stoichiometric coefficient");
            l.emplace_back(intern(t.species, sc), t.coeff);
        }
        for (const RawTerm& t : rhs) {
            if (t.coeff.negative()) sc.fail("negative stoichiometric coefficient");
            p.emplace_back(intern(t.species, sc), t.coeff);
        }

        Reaction r;
        r.rate = rate;
        r.delay = delay;
        r.reactant.coeffs.assign(net.species.size(), Rational(0));
        r.product.coeffs.assign(net.species.size(), Rational(0));
        for (auto& [id, c] : l) r.reactant.coeffs[id] += c;
        for (auto& [id, c] : p) r.product.coeffs[id] += c;
        if (!r.reactant.is_integral()) sc.fail("reactant complex must be integral");
        if (r.reactant == r.product) sc.fail("self-loop reaction (reactant equals product)");
        net.reactions.push_back(std::move(r));
    }

    // Pad earlier complexes to the final species count.
    for (Reaction& r : net.reactions) {
        r.reactant.coeffs.resize(net.species.size(), Rational(0));
        r.product.coeffs.resize(net.species.size(), Rational(0));
    }

    if (net.reactions.empty()) throw ParseError("no reactions in input", lineno, 1);
    try {
        net.validate();
    } catch (const Error& e) {
        throw ParseError(e.what(), lineno, 1);
    }
    return net;
}

std::string format_complex(const std::vector<std::string>& species, const Complex& c) {
    std::string out;
    for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
        const Rational& k = c.coeffs[j];
        if (k.is_zero()) continue;
        if (!out.empty()) out += " + ";
        if (!(k == Rational(1))) out += k.str();
        out += species[j];
    }
    return out.empty() ? "0" : out;
}

std::string format_network(const Network& net) {
    std::string out = "species: ";
    for (std::size_t j = 0; j < net.species.size(); ++j)
        out += (j ? ", " : "") + net.species[j];
    out += "\n";
    for (const Reaction& r : net.reactions) {
        out += format_complex(net.species, r.reactant);
        out += " -> ";
        out += format_complex(net.species, r.product);
        out += " : k=" + r.rate.str();
        if (!r.delay.is_zero()) out += ", tau=" + r.delay.str();
        out += "\n";
    }
    return out;
}

}  // namespace crnstab
