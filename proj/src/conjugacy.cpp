#include "crnstab/conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "crnstab/error.hpp"
#include "crnstab/parse.hpp"
#include "linalg_detail.hpp"

namespace crnstab {

DiagonalMap::DiagonalMap(std::vector<Rational> entries) : q(std::move(entries)) {
    for (const Rational& v : q)
        if (!v.positive()) throw Error("diagonal map entries must be positive");
}

Vec DiagonalMap::to_doubles() const {
    Vec v;
    v.reserve(q.size());
    for (const Rational& r : q) v.push_back(r.to_double());
    return v;
}

bool DiagonalMap::is_identity() const {
    return std::all_of(q.begin(), q.end(), [](const Rational& r) { return r == Rational(1); });
}

bool DiagonalMap::is_scalar() const {
    return std::all_of(q.begin(), q.end(), [&](const Rational& r) { return r == q.front(); });
}

void DelayedMonomialField::add(const Key& k, const Vec& coeff) {
    auto [it, inserted] = terms.emplace(k, coeff);
    if (!inserted)
        for (std::size_t j = 0; j < coeff.size(); ++j) it->second[j] += coeff[j];
}

void DelayedMonomialField::prune() {
    for (auto it = terms.begin(); it != terms.end();) {
        bool zero = std::all_of(it->second.begin(), it->second.end(),
                                [](double c) { return c == 0.0; });
        it = zero ? terms.erase(it) : std::next(it);
    }
}

DelayedMonomialField DelayedMonomialField::reordered(const std::vector<std::string>& order) const {
    if (order.size() != species.size()) throw Error("species count mismatch in field reorder");
    std::vector<std::size_t> map(order.size());  // new index -> old index
    for (std::size_t j = 0; j < order.size(); ++j) {
        auto it = std::find(species.begin(), species.end(), order[j]);
        if (it == species.end()) throw Error("species '" + order[j] + "' missing in field reorder");
        map[j] = static_cast<std::size_t>(it - species.begin());
    }
    DelayedMonomialField out;
    out.species = order;
    for (const auto& [key, coeff] : terms) {
        Key k;
        k.delay = key.delay;
        k.exponents.coeffs.resize(order.size());
        Vec c(order.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            k.exponents.coeffs[j] = key.exponents.coeffs[map[j]];
            c[j] = coeff[map[j]];
        }
        out.terms.emplace(std::move(k), std::move(c));
    }
    return out;
}

DelayedMonomialField delayed_field(const Network& net) {
    net.validate();
    DelayedMonomialField f;
    f.species = net.species;
    const std::size_t n = net.species_count();
    for (const Reaction& r : net.reactions) {
        double k = r.rate.to_double();
        Vec in(n), out(n);
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = k * r.product.coeffs[j].to_double();
            in[j] = -k * r.reactant.coeffs[j].to_double();
        }
        f.add({r.reactant, r.delay}, out);
        f.add({r.reactant, Rational(0)}, in);
    }
    f.prune();
    return f;
}

DelayedMonomialField transform_field(const DelayedMonomialField& f, const Vec& q) {
    if (q.size() != f.species.size()) throw Error("diagonal size does not match species count");
    for (double v : q)
        if (!(v > 0.0)) throw Error("diagonal map entries must be positive");
    DelayedMonomialField out;
    out.species = f.species;
    for (const auto& [key, coeff] : f.terms) {
        std::vector<long> y = key.exponents.integer_exponents();
        double factor = 1.0;
        for (std::size_t j = 0; j < q.size(); ++j)
            factor *= std::pow(q[j], static_cast<double>(-y[j]));
        Vec c(coeff.size());
        for (std::size_t j = 0; j < coeff.size(); ++j) c[j] = factor * q[j] * coeff[j];
        out.terms.emplace(key, std::move(c));
    }
    out.prune();
    return out;
}

DelayedMonomialField transform_field(const DelayedMonomialField& f, const DiagonalMap& q) {
    return transform_field(f, q.to_doubles());
}

namespace {

std::string describe_key(const std::vector<std::string>& species,
                         const DelayedMonomialField::Key& key) {
    return "(" + format_complex(species, key.exponents) + ", tau=" + key.delay.str() + ")";
}

/// Terms with at least one coefficient above tol; rounding dust drops out.
std::map<DelayedMonomialField::Key, Vec> significant_terms(const DelayedMonomialField& f,
                                                           double tol) {
    std::map<DelayedMonomialField::Key, Vec> out;
    for (const auto& [key, coeff] : f.terms)
        if (std::any_of(coeff.begin(), coeff.end(),
                        [tol](double c) { return std::abs(c) > tol; }))
            out.emplace(key, coeff);
    return out;
}

/// Realization of one source reaction in the non-scalar branch.
void emit_reaction(Network& out, RealizationResult& res, int origin,
                   const Complex& reactant, const Complex& product,
                   const Rational& rate, const Rational& delay, bool is_delayed) {
    out.reactions.push_back({reactant, product, rate, delay});
    res.reaction_origin.push_back(origin);
    res.reaction_delayed.push_back(is_delayed);
}

}  // namespace

RealizationResult construct_lcdcb(const Network& dcb, const DiagonalMap& q) {
    dcb.validate();
    const std::size_t n = dcb.species_count();
    if (q.size() != n) throw Error("diagonal size does not match species count");

    RealizationResult res;
    res.q = q;
    res.species_permutation.resize(n);
    std::iota(res.species_permutation.begin(), res.species_permutation.end(), std::size_t{0});

    if (q.is_scalar()) {
        // Same reactions and delays; rates pick up q^(1 - sum_j y_ji).
        const Rational& s = q.q.front();
        res.network = dcb;
        for (std::size_t i = 0; i < dcb.reactions.size(); ++i) {
            long total = 0;
            for (const Rational& c : dcb.reactions[i].reactant.coeffs)
                total += c.num();  // integral reactant
            res.network.reactions[i].rate = dcb.reactions[i].rate * s.pow(1 - total);
            res.reaction_origin.push_back(static_cast<int>(i));
            res.reaction_delayed.push_back(true);
        }
        return res;
    }

    // Reorder species so the largest diagonal entry comes first (smallest
    // index on ties); everything below works in the permuted order.
    std::size_t top = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (q.q[j] > q.q[top]) top = j;
    std::vector<std::size_t>& perm = res.species_permutation;
    perm.clear();
    perm.push_back(top);
    for (std::size_t j = 0; j < n; ++j)
        if (j != top) perm.push_back(j);

    std::vector<Rational> qp(n);
    Network& out = res.network;
    out.species.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        qp[j] = q.q[perm[j]];
        out.species[j] = dcb.species[perm[j]];
    }
    const Rational& q1 = qp[0];

    auto permute = [&](const Complex& c) {
        Complex p;
        p.coeffs.resize(n);
        for (std::size_t j = 0; j < n; ++j) p.coeffs[j] = c.coeffs[perm[j]];
        return p;
    };

    struct Companion {
        int origin;
        Complex reactant, product;
        Rational rate;
    };
    std::vector<Companion> companions;

    for (std::size_t i = 0; i < dcb.reactions.size(); ++i) {
        const Reaction& r = dcb.reactions[i];
        Complex y = permute(r.reactant);
        Complex yp = permute(r.product);

        // kappa_i = rate * prod_j q_j^-y_ji, exact since reactants are integral.
        Rational kappa = r.rate;
        for (std::size_t j = 0; j < n; ++j)
            kappa *= qp[j].pow(-y.coeffs[j].num());

        Complex target;  // (q_j / q_1) y'_j
        target.coeffs.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            target.coeffs[j] = yp.coeffs[j] * qp[j] / q1;

        int origin = static_cast<int>(i);
        if (target == y) {
            // Degenerate direction: Q y' = q_1 y. A reaction y -> y is not
            // representable, so emit two delayed halves whose contributions
            // sum to the required kappa*q1*[x(t-tau)^y - x(t)^y] y term.
            if (!r.delay.is_zero()) {
                Complex doubled = y, zero;
                zero.coeffs.assign(n, Rational(0));
                for (Rational& c : doubled.coeffs) c *= Rational(2);
                Rational half = kappa * q1 / Rational(2);
                emit_reaction(out, res, origin, y, doubled, half, r.delay, true);
                emit_reaction(out, res, origin, y, zero, half, r.delay, true);
                res.split_reactions++;
            }
            // With tau = 0 the delayed contribution cancels entirely.
        } else {
            emit_reaction(out, res, origin, y, target, kappa * q1, r.delay, true);
        }

        Complex shifted = y;  // y + (0, (q1-q2) y_2, ..., (q1-qn) y_n)
        for (std::size_t j = 1; j < n; ++j)
            shifted.coeffs[j] += (q1 - qp[j]) * y.coeffs[j];
        if (shifted == y)
            res.pruned_reactions++;
        else
            companions.push_back({origin, y, shifted, kappa});
    }

    for (const Companion& c : companions)
        emit_reaction(out, res, c.origin, c.reactant, c.product, c.rate, Rational(0), false);

    out.validate();
    return res;
}

ConjugacyReport check_linear_conjugacy(const Network& a, const Network& b,
                                       const Vec& q, double tol) {
    ConjugacyReport rep;
    if (a.species_count() != b.species_count()) {
        rep.mismatches.push_back("species counts differ");
        return rep;
    }
    for (const std::string& s : b.species)
        if (a.species_index(s) < 0) {
            rep.mismatches.push_back("species '" + s + "' missing from first network");
            return rep;
        }

    auto ta = significant_terms(delayed_field(a).reordered(b.species), tol);
    auto tb = significant_terms(transform_field(delayed_field(b), q), tol);

    auto ia = ta.begin();
    auto ib = tb.begin();
    while (ia != ta.end() || ib != tb.end()) {
        if (ib == tb.end() || (ia != ta.end() && ia->first < ib->first)) {
            rep.mismatches.push_back("extra term " + describe_key(b.species, ia->first));
            ++ia;
            continue;
        }
        if (ia == ta.end() || ib->first < ia->first) {
            rep.mismatches.push_back("missing term " + describe_key(b.species, ib->first));
            ++ib;
            continue;
        }
        for (std::size_t j = 0; j < b.species.size(); ++j) {
            double da = ia->second[j], db = ib->second[j];
            if (std::abs(da - db) > tol) {
                std::ostringstream os;
                os << "coefficient mismatch at " << describe_key(b.species, ia->first)
                   << " component " << b.species[j] << ": " << da << " vs " << db;
                rep.mismatches.push_back(os.str());
            }
        }
        ++ia;
        ++ib;
    }
    rep.conjugate = rep.mismatches.empty();
    return rep;
}

ConjugacyReport check_linear_conjugacy(const Network& a, const Network& b,
                                       const DiagonalMap& q, double tol) {
    return check_linear_conjugacy(a, b, q.to_doubles(), tol);
}

ConjugacySolve solve_conjugacy(const Network& a, const Network& b) {
    ConjugacySolve out;
    if (a.species_count() != b.species_count()) {
        out.detail = "species counts differ";
        return out;
    }
    for (const std::string& s : b.species)
        if (a.species_index(s) < 0) {
            out.detail = "species '" + s + "' missing from first network";
            return out;
        }

    const std::size_t n = b.species_count();
    const double zero_tol = 1e-12;
    auto ta = significant_terms(delayed_field(a).reordered(b.species), zero_tol);
    auto tb = significant_terms(delayed_field(b), zero_tol);

    if (ta.size() != tb.size()) {
        out.detail = "monomial supports differ: no diagonal conjugacy exists";
        return out;
    }

    // Each shared key gives linear equations for u = Ln(q):
    //   ln|c_a[j]| - ln|c_b[j]| = u_j - y^T u,   sign(c_a[j]) = sign(c_b[j]).
    std::vector<Vec> rows;
    Vec rhs;
    for (const auto& [key, ca] : ta) {
        auto it = tb.find(key);
        if (it == tb.end()) {
            out.detail = "term " + describe_key(b.species, key) +
                         " has no counterpart: no diagonal conjugacy exists";
            return out;
        }
        const Vec& cb = it->second;
        std::vector<long> y = key.exponents.integer_exponents();
        for (std::size_t j = 0; j < n; ++j) {
            bool za = std::abs(ca[j]) <= zero_tol;
            bool zb = std::abs(cb[j]) <= zero_tol;
            if (za != zb) {
                out.detail = "component " + b.species[j] + " of term " +
                             describe_key(b.species, key) +
                             " is zero on one side only: no diagonal conjugacy exists";
                return out;
            }
            if (za) continue;
            if ((ca[j] > 0) != (cb[j] > 0)) {
                out.detail = "component " + b.species[j] + " of term " +
                             describe_key(b.species, key) +
                             " changes sign: no diagonal conjugacy exists";
                return out;
            }
            Vec row(n, 0.0);
            for (std::size_t k = 0; k < n; ++k) row[k] = -static_cast<double>(y[k]);
            row[j] += 1.0;
            rows.push_back(std::move(row));
            rhs.push_back(std::log(std::abs(ca[j])) - std::log(std::abs(cb[j])));
        }
    }

    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        A.row(static_cast<Eigen::Index>(i)) = detail::to_eigen(rows[i]).transpose();
        r(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    Eigen::VectorXd u = detail::min_norm_least_squares(A, r);

    Vec q(n);
    for (std::size_t j = 0; j < n; ++j) q[j] = std::exp(u(static_cast<Eigen::Index>(j)));
    ConjugacyReport check = check_linear_conjugacy(a, b, q, 1e-9);
    if (!check.conjugate) {
        out.detail = "no diagonal Q reproduces the coefficient map (best candidate fails: " +
                     (check.mismatches.empty() ? std::string("unknown") : check.mismatches.front()) + ")";
        return out;
    }
    out.feasible = true;
    out.q = q;
    std::ostringstream os;
    os << "witness Q = diag(";
    for (std::size_t j = 0; j < n; ++j) os << (j ? ", " : "") << q[j];
    os << ")";
    out.detail = os.str();
    return out;
}

}  // namespace crnstab
