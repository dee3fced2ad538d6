#pragma once

#include <optional>
#include <vector>

#include "crnstab/conjugacy.hpp"
#include "crnstab/history.hpp"
#include "crnstab/network.hpp"
#include "crnstab/simulate.hpp"

namespace crnstab {

/// Conserved functional over history segments,
///   a^T [ psi(0) + sum_i (rho_i int_{-tau_i}^0 psi(s)^{y_i} ds) u_i ],
/// with rho_i = kappa_i, u_i = y_i for the plain mode and
/// rho_i = kappa_i prod_j q_j^-y_ji, u_i = Q y_i for the Q-weighted mode.
/// Constant along trajectories of the matching system; level sets are the
/// invariant compatibility classes.
class ConservedFunctional {
public:
    enum class Mode { plain, q_weighted };

    struct Term {
        double weight;                 // rho_i * (a . u_i)
        Rational delay;
        std::vector<long> exponents;  // reactant complex y_i
    };

    Mode mode() const { return mode_; }
    const Vec& direction() const { return a_; }
    const std::vector<Term>& terms() const { return terms_; }

    double eval(const HistoryFunction& psi) const;
    /// Evaluates on the trajectory segment psi_t(s) = x(t + s).
    double eval(const Trajectory& traj, double t) const;

private:
    friend ConservedFunctional make_c_a(const Network&, const Vec&);
    friend ConservedFunctional make_h_a(const Network&, const DiagonalMap&, const Vec&);
    Mode mode_ = Mode::plain;
    Vec a_;
    std::vector<Term> terms_;
};

/// Requires |a . v| <= 1e-10 for every reaction vector v of net.
ConservedFunctional make_c_a(const Network& net, const Vec& a);
/// Requires Q a orthogonal to the reference network's reaction vectors.
ConservedFunctional make_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a);

double eval_c_a(const Network& net, const Vec& a, const HistoryFunction& psi);
double eval_c_a(const Network& net, const Vec& a, const Trajectory& traj, double t);
double eval_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a,
                const HistoryFunction& psi);
double eval_h_a(const Network& dcb, const DiagonalMap& q, const Vec& a,
                const Trajectory& traj, double t);

/// Entropy-like Lyapunov-Krasovskii functional
///   sum_j w_j [psi_j(0)(ln psi_j(0) - ln x*_j - 1) + x*_j]
///   + sum_i rho_i int_{-tau_i}^0 { psi^{y_i}[ln psi^{y_i} - ln x*^{y_i} - 1] + x*^{y_i} } ds,
/// non-negative, zero iff psi is constantly x*. Plain weights w_j = 1 and
/// rho_i = kappa_i; the Q-weighted variant uses w_j = 1/q_j and
/// rho_i = kappa_i prod_j q_j^-y_ji for conjugate realizations.
struct LyapunovSpec {
    Vec reference;       // x* (or x-bar), strictly positive
    Vec species_weights;
    struct Term {
        double rate;     // rho_i
        Rational delay;
        std::vector<long> exponents;
        double reference_monomial;  // x*^{y_i}
    };
    std::vector<Term> terms;
};

LyapunovSpec make_lyapunov(const Network& net, const Vec& reference);
LyapunovSpec make_lyapunov_conjugate(const Network& dcb, const DiagonalMap& q,
                                     const Vec& reference);

double eval_lyapunov(const LyapunovSpec& spec, const HistoryFunction& psi);
double eval_lyapunov(const LyapunovSpec& spec, const Trajectory& traj, double t);

/// z (ln z - ln c - 1) + c extended continuously by c at z = 0; >= 0, with
/// equality iff z = c.
double entropy_term(double z, double c);

struct DissipationReport {
    std::vector<double> times;
    std::vector<double> values;
    double max_forward_difference = 0.0;
    double tolerance = 0.0;  // 1e-7 * (1 + |V(0)|)
    bool monotone = false;
};

/// Samples the functional along the trajectory every sample_dt and certifies
/// monotone non-increase within the scaled tolerance.
DissipationReport dissipation_report(const Trajectory& traj, const LyapunovSpec& spec,
                                     double sample_dt);

/// Largest v[k+1] - v[k]; -inf for series shorter than 2.
double max_forward_difference(const std::vector<double>& values);

}  // namespace crnstab
