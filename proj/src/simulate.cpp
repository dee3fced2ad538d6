#include "crnstab/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "crnstab/conjugacy.hpp"
#include "crnstab/error.hpp"

namespace crnstab {

namespace {

struct FieldTerm {
    std::vector<long> exponents;
    double tau = 0.0;
    bool delayed = false;
    Vec coeff;
};

/// Flattens the canonical field into evaluation terms. Delayed terms depend
/// only on time (their state comes from the dense output), undelayed terms on
/// the current stage state; the split keeps the scheme explicit.
std::vector<FieldTerm> field_terms(const Network& net) {
    DelayedMonomialField f = delayed_field(net);
    std::vector<FieldTerm> terms;
    for (const auto& [key, coeff] : f.terms) {
        FieldTerm t;
        t.exponents = key.exponents.integer_exponents();
        t.tau = key.delay.to_double();
        t.delayed = key.delay.positive();
        t.coeff = coeff;
        terms.push_back(std::move(t));
    }
    return terms;
}

long ceil_div(long long a, long long b) {
    return static_cast<long>((a + b - 1) / b);
}

}  // namespace

Rational effective_step(const Network& net, const Rational& requested) {
    if (!requested.positive())
        throw SimulationError(SimulationError::Kind::bad_argument, "step must be positive");

    Rational g(0), tau_min(0);
    for (const Reaction& r : net.reactions) {
        if (!r.delay.positive()) continue;
        g = Rational::gcd(g, r.delay);
        if (tau_min.is_zero() || r.delay < tau_min) tau_min = r.delay;
    }
    if (g.is_zero()) return requested;  // no positive delays: plain one-step method

    // h = g/m with h <= requested and tau_min >= 10 h. tau_min = k g exactly.
    Rational ratio = g / requested;                      // need m >= ratio
    long m1 = ceil_div(ratio.num(), ratio.den());
    Rational k = tau_min / g;                            // integer by gcd construction
    long m2 = ceil_div(10, k.num());
    long m = std::max({m1, m2, 1L});
    return g / Rational(m);
}

Trajectory simulate(const Network& net, const HistoryFunction& history, double t_end,
                    const Rational& step) {
    net.validate();
    const std::size_t n = net.species_count();
    if (history.size() != n)
        throw SimulationError(SimulationError::Kind::bad_argument,
                              "history dimension does not match species count");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw SimulationError(SimulationError::Kind::bad_argument, "t_end must be >= 0");

    Rational h_exact = effective_step(net, step);
    const double h = h_exact.to_double();
    const double tau_max = net.max_delay().to_double();
    history.validate_positive(tau_max);

    long steps = t_end <= 0.0 ? 0 : static_cast<long>(std::ceil(t_end / h - 1e-9));
    if (steps > 50'000'000)
        throw SimulationError(SimulationError::Kind::bad_argument,
                              "step too small for requested horizon (" +
                                  std::to_string(steps) + " steps); delays may be "
                                  "incommensurate with the requested step");

    std::vector<FieldTerm> terms = field_terms(net);

    Trajectory traj;
    traj.history_ = history;
    traj.tau_max_ = tau_max;
    traj.step_ = h;
    traj.grid_.reserve(steps + 1);
    traj.states_.reserve(steps + 1);
    traj.derivatives_.reserve(steps + 1);

    // Delayed contributions depend on t only; arguments t - tau always lie in
    // already-completed territory because every positive delay spans >= 10
    // steps.
    auto delayed_part = [&](double t) {
        Vec acc(n, 0.0);
        for (const FieldTerm& term : terms) {
            if (!term.delayed) continue;
            double m = monomial(traj.lookup(t - term.tau), term.exponents);
            for (std::size_t j = 0; j < n; ++j) acc[j] += m * term.coeff[j];
        }
        return acc;
    };
    auto add_undelayed = [&](const Vec& x, Vec rhs) {
        for (const FieldTerm& term : terms) {
            if (term.delayed) continue;
            double m = monomial(x, term.exponents);
            for (std::size_t j = 0; j < n; ++j) rhs[j] += m * term.coeff[j];
        }
        return rhs;
    };

    Vec x0 = history.eval(0.0);
    traj.grid_.push_back(0.0);
    traj.states_.push_back(x0);
    traj.derivatives_.push_back(add_undelayed(x0, delayed_part(0.0)));

    Vec stage(n), k1, k2, k3, k4;
    for (long s = 0; s < steps; ++s) {
        double t = static_cast<double>(s) * h;
        double t_next = static_cast<double>(s + 1) * h;
        const Vec& x = traj.states_.back();

        Vec d_mid = delayed_part(t + 0.5 * h);
        Vec d_end = delayed_part(t_next);

        k1 = traj.derivatives_.back();  // delayed_part(t) + undelayed(x)
        for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * h * k1[j];
        k2 = add_undelayed(stage, d_mid);
        for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + 0.5 * h * k2[j];
        k3 = add_undelayed(stage, d_mid);
        for (std::size_t j = 0; j < n; ++j) stage[j] = x[j] + h * k3[j];
        k4 = add_undelayed(stage, d_end);

        Vec next(n);
        for (std::size_t j = 0; j < n; ++j)
            next[j] = x[j] + h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);

        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(next[j]))
                throw SimulationError(SimulationError::Kind::nonfinite,
                                      "vector field produced a non-finite state at t=" +
                                          std::to_string(t_next), t_next);
            if (next[j] <= 0.0)
                throw SimulationError(SimulationError::Kind::positivity_lost,
                                      "state positivity lost at t=" + std::to_string(t_next) +
                                          " in species " + net.species[j] +
                                          "; use a smaller step", t_next);
        }

        traj.grid_.push_back(t_next);
        traj.states_.push_back(next);
        traj.derivatives_.push_back(add_undelayed(next, d_end));
    }
    return traj;
}

Vec Trajectory::lookup(double t) const {
    const double slack = 1e-9 * (1.0 + std::abs(t_end()));
    if (t < -tau_max_ - slack || t > t_end() + slack)
        throw Error("trajectory lookup out of range: t=" + std::to_string(t));
    if (t <= 0.0) return history_.eval(std::max(t, -tau_max_));

    // Segment via binary search: exact grid hits return stored states (theta
    // lands exactly on 0 or 1, where the Hermite basis is exact).
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    if (k == 0) return states_.front();
    if (k >= grid_.size()) return states_.back();
    --k;

    double h = grid_[k + 1] - grid_[k];
    double theta = (t - grid_[k]) / h;
    double t2 = theta * theta, t3 = t2 * theta;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    double h10 = t3 - 2.0 * t2 + theta;
    double h01 = -2.0 * t3 + 3.0 * t2;
    double h11 = t3 - t2;

    const Vec& xa = states_[k];
    const Vec& xb = states_[k + 1];
    const Vec& da = derivatives_[k];
    const Vec& db = derivatives_[k + 1];
    Vec out(xa.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = h00 * xa[j] + h01 * xb[j] + h * (h10 * da[j] + h11 * db[j]);
    return out;
}

std::vector<double> Trajectory::knots_between(double a, double b) const {
    std::vector<double> out;
    auto lo = std::upper_bound(grid_.begin(), grid_.end(), a);
    auto hi = std::lower_bound(grid_.begin(), grid_.end(), b);
    for (auto it = lo; it != hi; ++it) out.push_back(*it);
    return out;
}

Trajectory Trajectory::from_samples(std::vector<double> grid, std::vector<Vec> states,
                                    std::vector<Vec> derivatives, HistoryFunction history,
                                    double tau_max) {
    if (grid.size() != states.size() || grid.size() != derivatives.size() || grid.empty())
        throw Error("inconsistent trajectory samples");
    Trajectory t;
    t.grid_ = std::move(grid);
    t.states_ = std::move(states);
    t.derivatives_ = std::move(derivatives);
    t.history_ = std::move(history);
    t.tau_max_ = tau_max;
    t.step_ = t.grid_.size() > 1 ? t.grid_[1] - t.grid_[0] : 0.0;
    return t;
}

}  // namespace crnstab
