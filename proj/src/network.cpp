#include "crnstab/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crnstab/error.hpp"

namespace crnstab {

bool Complex::is_integral() const {
    return std::all_of(coeffs.begin(), coeffs.end(),
                       [](const Rational& r) { return r.is_integer(); });
}

bool Complex::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(),
                       [](const Rational& r) { return r.is_zero(); });
}

std::vector<long> Complex::integer_exponents() const {
    std::vector<long> e;
    e.reserve(coeffs.size());
    for (const Rational& r : coeffs) {
        if (!r.is_integer()) throw Error("complex is not integral");
        e.push_back(static_cast<long>(r.num()));
    }
    return e;
}

Vec Complex::as_doubles() const {
    Vec v;
    v.reserve(coeffs.size());
    for (const Rational& r : coeffs) v.push_back(r.to_double());
    return v;
}

void Network::validate() const {
    if (species.empty()) throw Error("network has no species");
    if (reactions.empty()) throw Error("network has no reactions");

    std::set<std::string> seen;
    for (const std::string& s : species) {
        if (s.empty()) throw Error("empty species name");
        if (!seen.insert(s).second) throw Error("duplicate species name: " + s);
    }

    bool any_nonzero = false;
    for (std::size_t i = 0; i < reactions.size(); ++i) {
        const Reaction& r = reactions[i];
        const std::string where = " in reaction " + std::to_string(i + 1);
        if (r.reactant.size() != species.size() || r.product.size() != species.size())
            throw Error("complex length does not match species count" + where);
        for (const Rational& c : r.reactant.coeffs)
            if (c.negative()) throw Error("negative stoichiometric coefficient" + where);
        for (const Rational& c : r.product.coeffs)
            if (c.negative()) throw Error("negative stoichiometric coefficient" + where);
        if (!r.reactant.is_integral())
            throw Error("reactant complex must be integral" + where);
        if (!r.rate.positive()) throw Error("non-positive rate" + where);
        if (r.delay.negative()) throw Error("negative delay" + where);
        if (r.reactant == r.product) throw Error("self-loop reaction" + where);
        any_nonzero = any_nonzero || !r.reactant.is_zero() || !r.product.is_zero();
    }
    if (!any_nonzero) throw Error("all complexes are zero");
}

Rational Network::max_delay() const {
    Rational m(0);
    for (const Reaction& r : reactions)
        if (r.delay > m) m = r.delay;
    return m;
}

int Network::species_index(const std::string& name) const {
    auto it = std::find(species.begin(), species.end(), name);
    return it == species.end() ? -1 : static_cast<int>(it - species.begin());
}

Network reordered_network(const Network& net, const std::vector<std::string>& order) {
    if (order.size() != net.species.size())
        throw Error("reorder: species count mismatch");
    std::vector<std::size_t> map(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        int ix = net.species_index(order[j]);
        if (ix < 0) throw Error("reorder: unknown species '" + order[j] + "'");
        map[j] = static_cast<std::size_t>(ix);
    }
    Network out;
    out.species = order;
    out.reactions = net.reactions;
    for (Reaction& r : out.reactions) {
        Complex re, pr;
        re.coeffs.resize(order.size());
        pr.coeffs.resize(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            re.coeffs[j] = r.reactant.coeffs[map[j]];
            pr.coeffs[j] = r.product.coeffs[map[j]];
        }
        r.reactant = std::move(re);
        r.product = std::move(pr);
    }
    return out;
}

double monomial(const Vec& x, const std::vector<long>& exponents) {
    double v = 1.0;
    for (std::size_t j = 0; j < exponents.size(); ++j) {
        long e = exponents[j];
        double b = x[j];
        while (e > 0) {
            if (e & 1) v *= b;
            b *= b;
            e >>= 1;
        }
    }
    return v;
}

}  // namespace crnstab
