#pragma once

#include <vector>

#include "crnstab/history.hpp"
#include "crnstab/network.hpp"

namespace crnstab {

/// Dense solution of a delayed simulation on [-tau_max, t_end]: fixed-step
/// grid states with derivatives for cubic Hermite interpolation, spliced with
/// the initial history for negative times. Immutable once returned; safe to
/// share across threads.
class Trajectory {
public:
    Vec lookup(double t) const;

    double step() const { return step_; }
    double t_end() const { return grid_.empty() ? 0.0 : grid_.back(); }
    double t_begin() const { return -tau_max_; }
    double tau_max() const { return tau_max_; }
    std::size_t dimension() const { return states_.empty() ? 0 : states_[0].size(); }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Vec>& states() const { return states_; }
    const std::vector<Vec>& derivatives() const { return derivatives_; }
    const HistoryFunction& history() const { return history_; }

    /// Grid times strictly inside (a, b); smoothness breaks of the dense
    /// output, used to split quadrature panels.
    std::vector<double> knots_between(double a, double b) const;

    static Trajectory from_samples(std::vector<double> grid, std::vector<Vec> states,
                                   std::vector<Vec> derivatives, HistoryFunction history,
                                   double tau_max);

private:
    friend Trajectory simulate(const Network&, const HistoryFunction&, double, const Rational&);

    std::vector<double> grid_;
    std::vector<Vec> states_;
    std::vector<Vec> derivatives_;
    HistoryFunction history_;
    double tau_max_ = 0.0;
    double step_ = 0.0;
};

/// Integrates the delayed mass-action dynamics by the classical 4th-order
/// method of steps with cubic Hermite dense output.
///
/// The requested step is reduced so that it divides the gcd of the (rational)
/// positive delays and every positive delay spans at least 10 steps; solution
/// breaking points then land exactly on grid points. Throws SimulationError
/// if positivity is lost or the vector field stops being finite.
Trajectory simulate(const Network& net, const HistoryFunction& history, double t_end,
                    const Rational& step);

/// The step simulate() will actually use.
Rational effective_step(const Network& net, const Rational& requested);

}  // namespace crnstab
