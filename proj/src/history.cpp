#include "crnstab/history.hpp"

#include <cctype>
#include <cmath>

#include "crnstab/error.hpp"

namespace crnstab {

struct Expression::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Neg, Sin, Cos };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = v;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

// Recursive-descent parser over:
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := number | 's' | ('sin'|'cos') '(' expr ')' | '(' expr ')' | '-' factor
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            skip_ws();
            if (accept('+')) e = make(Op::Add, e, term());
            else if (accept('-')) e = make(Op::Sub, e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            skip_ws();
            if (accept('*')) e = make(Op::Mul, e, factor());
            else return e;
        }
    }

    NodePtr factor() {
        skip_ws();
        if (accept('-')) return make(Op::Neg, factor());
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(peek()) || peek() == '.') return number();
        if (std::isalpha(peek())) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string_view word = text_.substr(start, pos_ - start);
            if (word == "s") return make(Op::Var);
            if (word == "sin" || word == "cos") {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make(word == "sin" ? Op::Sin : Op::Cos, arg);
            }
            fail("unknown identifier '" + std::string(word) + "'");
        }
        fail("expected expression");
        return nullptr;
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        try {
            return make(Op::Const, nullptr, nullptr, std::stod(std::string(text_.substr(start, pos_ - start))));
        } catch (const std::exception&) {
            fail("bad numeric literal");
            return nullptr;
        }
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) { ++pos_; return true; }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("history expression: " + msg + " at offset " + std::to_string(pos_) +
                    " in \"" + std::string(text_) + "\"");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, double s) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: return s;
        case Op::Add: return eval_node(*n.lhs, s) + eval_node(*n.rhs, s);
        case Op::Sub: return eval_node(*n.lhs, s) - eval_node(*n.rhs, s);
        case Op::Mul: return eval_node(*n.lhs, s) * eval_node(*n.rhs, s);
        case Op::Neg: return -eval_node(*n.lhs, s);
        case Op::Sin: return std::sin(eval_node(*n.lhs, s));
        case Op::Cos: return std::cos(eval_node(*n.lhs, s));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
    Expression e;
    e.root_ = ExprParser(text).run();
    e.text_ = std::string(text);
    return e;
}

double Expression::eval(double s) const { return eval_node(*root_, s); }

HistoryFunction HistoryFunction::constant(Vec values) {
    HistoryFunction h;
    h.constant_ = true;
    h.values_ = std::move(values);
    return h;
}

HistoryFunction HistoryFunction::expressions(const std::vector<std::string>& exprs) {
    HistoryFunction h;
    h.constant_ = false;
    for (const std::string& e : exprs) h.exprs_.push_back(Expression::parse(e));
    return h;
}

const Vec& HistoryFunction::constant_value() const {
    if (!constant_) throw Error("history is not constant");
    return values_;
}

Vec HistoryFunction::eval(double s) const {
    if (constant_) return values_;
    Vec v;
    v.reserve(exprs_.size());
    for (const Expression& e : exprs_) v.push_back(e.eval(s));
    return v;
}

void HistoryFunction::validate_positive(double tau_max) const {
    if (size() == 0) throw Error("empty history");
    if (constant_) {
        for (double v : values_)
            if (!(v > 0.0)) throw Error("history must be strictly positive");
        return;
    }
    Vec at0 = eval(0.0);
    for (double v : at0)
        if (!(v > 0.0)) throw Error("history must be strictly positive at s=0");
    // Expression histories may touch zero inside the interval (e.g. sin(s)+1);
    // only negativity is rejected.
    const int samples = 512;
    for (int k = 0; k <= samples; ++k) {
        double s = -tau_max + tau_max * static_cast<double>(k) / samples;
        for (double v : eval(s))
            if (v < -1e-12 || !std::isfinite(v))
                throw Error("history is negative on [-tau_max, 0] near s=" + std::to_string(s));
    }
}

std::string HistoryFunction::describe() const {
    std::string out = constant_ ? "const:" : "expr:";
    if (constant_) {
        for (std::size_t j = 0; j < values_.size(); ++j)
            out += (j ? "," : "") + std::to_string(values_[j]);
    } else {
        for (std::size_t j = 0; j < exprs_.size(); ++j)
            out += (j ? "," : "") + exprs_[j].text();
    }
    return out;
}

}  // namespace crnstab
