#include "crnstab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "crnstab/error.hpp"
#include "crnstab/structure.hpp"

namespace crnstab {

namespace {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

void require_orthogonal(const Vec& a, const std::vector<Vec>& reaction_vecs,
                        const char* what) {
    for (const Vec& v : reaction_vecs) {
        double bound = 1e-10 * std::max(1.0, norm2(a) * norm2(v));
        if (std::abs(dot(a, v)) > bound)
            throw Error(std::string(what) + ": direction is not orthogonal to the "
                        "stoichiometric subspace");
    }
}

/// Composite Simpson with n (even) panels.
double simpson(const std::function<double(double)>& f, double a, double b, long n) {
    double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (long i = 1; i < n; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return acc * h / 3.0;
}

/// Integrates f over [a, b] split at the given interior knots (smoothness
/// breaks). Panel counts start at >= 64 over the interval and double until
/// two successive levels agree to 1e-10 (cap 1024); every piece is refined at
/// each level so the comparison is meaningful.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& knots) {
    if (!(b > a)) return 0.0;
    std::vector<double> bounds{a};
    for (double k : knots)
        if (k > bounds.back() + 1e-14 && k < b - 1e-14) bounds.push_back(k);
    bounds.push_back(b);

    const double total = b - a;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    for (long level = 64; level <= 1024; level *= 2) {
        value = 0.0;
        for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
            double len = bounds[p + 1] - bounds[p];
            long n = std::max(level / 32, static_cast<long>(std::ceil(
                                              static_cast<double>(level) * len / total)));
            if (n % 2) ++n;
            value += simpson(f, bounds[p], bounds[p + 1], n);
        }
        if (!std::isnan(prev) && std::abs(value - prev) <= 1e-10 * (1.0 + std::abs(value)))
            return value;
        prev = value;
    }
    return value;
}

double history_monomial(const HistoryFunction& psi, const std::vector<long>& e, double s) {
    return monomial(psi.eval(s), e);
}

}  // namespace

double entropy_term(double z, double c) {
    if (z <= 0.0) return c;  // continuous extension: z ln z -> 0
    return z * (std::log(z / c) - 1.0) + c;
}

double ConservedFunctional::eval(const HistoryFunction& psi) const {
    double value = dot(a_, psi.eval(0.0));
    if (psi.is_constant()) {
        // Closed form: the integral of a constant is tau * psi^y.
        const Vec& v = psi.constant_value();
        for (const Term& t : terms_)
            value += t.weight * t.delay.to_double() * monomial(v, t.exponents);
        return value;
    }
    for (const Term& t : terms_) {
        if (t.delay.is_zero()) continue;
        double tau = t.delay.to_double();
        value += t.weight * integrate([&](double s) { return history_monomial(psi, t.exponents, s); },
                                      -tau, 0.0, {});
    }
    return value;
}

double ConservedFunctional::eval(const Trajectory& traj, double t) const {
    double value = dot(a_, traj.lookup(t));
    for (const Term& term : terms_) {
        if (term.delay.is_zero()) continue;
        double tau = term.delay.to_double();
        value += term.weight *
                 integrate([&](double u) { return monomial(traj.lookup(u), term.exponents); },
                           t - tau, t, traj.knots_between(t - tau, t));
    }
    return value;
}

ConservedFunctional make_c_a(const Network& net, const Vec& a) {
    net.validate();
    if (a.size() != net.species_count()) throw Error("direction dimension mismatch");
    require_orthogonal(a, reaction_vectors(net), "c_a");

    ConservedFunctional f;
    f.mode_ = ConservedFunctional::Mode::plain;
    f.a_ = a;
    for (const Reaction& r : net.reactions) {
        ConservedFunctional::Term t;
        t.exponents = r.reactant.integer_exponents();
        t.delay = r.delay;
        double ay = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            ay += a[j] * static_cast<double>(t.exponents[j]);
        t.weight = r.rate.to_double() * ay;
        f.terms_.push_back(std::move(t));
    }
    return f;
}

ConservedFunctional make_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a) {
    dcb.validate();
    const std::size_t n = dcb.species_count();
    if (a.size() != n || q.size() != n) throw Error("direction dimension mismatch");

    // a must lie in (Q^-1)^T S~-perp, i.e. Q a orthogonal to S~.
    Vec qd = q.to_doubles();
    Vec qa(n);
    for (std::size_t j = 0; j < n; ++j) qa[j] = qd[j] * a[j];
    require_orthogonal(qa, reaction_vectors(dcb), "h_a");

    ConservedFunctional f;
    f.mode_ = ConservedFunctional::Mode::q_weighted;
    f.a_ = a;
    for (const Reaction& r : dcb.reactions) {
        ConservedFunctional::Term t;
        t.exponents = r.reactant.integer_exponents();
        t.delay = r.delay;
        double rho = r.rate.to_double();
        for (std::size_t j = 0; j < n; ++j)
            rho *= std::pow(qd[j], static_cast<double>(-t.exponents[j]));
        double aqy = 0.0;  // a . (Q y_i)
        for (std::size_t j = 0; j < n; ++j)
            aqy += a[j] * qd[j] * static_cast<double>(t.exponents[j]);
        t.weight = rho * aqy;
        f.terms_.push_back(std::move(t));
    }
    return f;
}

double eval_c_a(const Network& net, const Vec& a, const HistoryFunction& psi) {
    return make_c_a(net, a).eval(psi);
}
double eval_c_a(const Network& net, const Vec& a, const Trajectory& traj, double t) {
    return make_c_a(net, a).eval(traj, t);
}
double eval_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a,
                const HistoryFunction& psi) {
    return make_h_a(dcb, q, a).eval(psi);
}
double eval_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a,
                const Trajectory& traj, double t) {
    return make_h_a(dcb, q, a).eval(traj, t);
}

namespace {

LyapunovSpec make_spec(const Network& net, const Vec& weights, const Vec& rates,
                       const Vec& reference) {
    LyapunovSpec spec;
    spec.reference = reference;
    spec.species_weights = weights;
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        LyapunovSpec::Term t;
        t.exponents = net.reactions[i].reactant.integer_exponents();
        t.delay = net.reactions[i].delay;
        t.rate = rates[i];
        t.reference_monomial = monomial(reference, t.exponents);
        spec.terms.push_back(std::move(t));
    }
    return spec;
}

}  // namespace

LyapunovSpec make_lyapunov(const Network& net, const Vec& reference) {
    net.validate();
    if (reference.size() != net.species_count()) throw Error("reference dimension mismatch");
    for (double v : reference)
        if (!(v > 0.0)) throw Error("reference must be strictly positive");
    Vec weights(net.species_count(), 1.0);
    Vec rates;
    for (const Reaction& r : net.reactions) rates.push_back(r.rate.to_double());
    return make_spec(net, weights, rates, reference);
}

LyapunovSpec make_lyapunov_conjugate(const Network& dcb, const DiagonalMap& q,
                                     const Vec& reference) {
    dcb.validate();
    const std::size_t n = dcb.species_count();
    if (reference.size() != n || q.size() != n) throw Error("reference dimension mismatch");
    for (double v : reference)
        if (!(v > 0.0)) throw Error("reference must be strictly positive");
    Vec qd = q.to_doubles();
    Vec weights(n);
    for (std::size_t j = 0; j < n; ++j) weights[j] = 1.0 / qd[j];
    Vec rates;
    for (const Reaction& r : dcb.reactions) {
        double rho = r.rate.to_double();
        std::vector<long> y = r.reactant.integer_exponents();
        for (std::size_t j = 0; j < n; ++j)
            rho *= std::pow(qd[j], static_cast<double>(-y[j]));
        rates.push_back(rho);
    }
    return make_spec(dcb, weights, rates, reference);
}

namespace {

double lyapunov_boundary(const LyapunovSpec& spec, const Vec& at0) {
    double v = 0.0;
    for (std::size_t j = 0; j < at0.size(); ++j) {
        if (!(at0[j] > 0.0)) throw Error("Lyapunov functional needs psi(0) > 0");
        v += spec.species_weights[j] * entropy_term(at0[j], spec.reference[j]);
    }
    return v;
}

}  // namespace

double eval_lyapunov(const LyapunovSpec& spec, const HistoryFunction& psi) {
    if (psi.size() != spec.reference.size()) throw Error("history dimension mismatch");
    double value = lyapunov_boundary(spec, psi.eval(0.0));
    for (const LyapunovSpec::Term& t : spec.terms) {
        if (t.delay.is_zero()) continue;
        double tau = t.delay.to_double();
        if (psi.is_constant()) {
            value += t.rate * tau *
                     entropy_term(monomial(psi.constant_value(), t.exponents), t.reference_monomial);
        } else {
            value += t.rate * integrate(
                                  [&](double s) {
                                      return entropy_term(history_monomial(psi, t.exponents, s),
                                                          t.reference_monomial);
                                  },
                                  -tau, 0.0, {});
        }
    }
    return value;
}

double eval_lyapunov(const LyapunovSpec& spec, const Trajectory& traj, double t) {
    if (traj.dimension() != spec.reference.size()) throw Error("trajectory dimension mismatch");
    double value = lyapunov_boundary(spec, traj.lookup(t));
    for (const LyapunovSpec::Term& term : spec.terms) {
        if (term.delay.is_zero()) continue;
        double tau = term.delay.to_double();
        value += term.rate *
                 integrate(
                     [&](double u) {
                         return entropy_term(monomial(traj.lookup(u), term.exponents),
                                             term.reference_monomial);
                     },
                     t - tau, t, traj.knots_between(t - tau, t));
    }
    return value;
}

double max_forward_difference(const std::vector<double>& values) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < values.size(); ++k)
        m = std::max(m, values[k + 1] - values[k]);
    return m;
}

DissipationReport dissipation_report(const Trajectory& traj, const LyapunovSpec& spec,
                                     double sample_dt) {
    if (!(sample_dt > 0.0)) throw Error("sample_dt must be positive");
    DissipationReport rep;
    for (double t = 0.0; t <= traj.t_end() + 1e-9; t += sample_dt) {
        double tc = std::min(t, traj.t_end());
        rep.times.push_back(tc);
        rep.values.push_back(eval_lyapunov(spec, traj, tc));
    }
    rep.max_forward_difference = max_forward_difference(rep.values);
    rep.tolerance = 1e-7 * (1.0 + std::abs(rep.values.empty() ? 0.0 : rep.values.front()));
    rep.monotone = rep.max_forward_difference <= rep.tolerance;
    return rep;
}

}  // namespace crnstab
