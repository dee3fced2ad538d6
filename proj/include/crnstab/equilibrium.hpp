#pragma once

#include <vector>

#include "crnstab/history.hpp"
#include "crnstab/network.hpp"

namespace crnstab {

struct EquilibriumResult {
    Vec point;                             // strictly positive
    std::vector<Complex> complexes;        // order of the residual entries
    std::vector<double> residuals;         // per-complex balance residuals
    std::vector<Vec> equilibrium_set_directions;  // basis of S-perp: the positive
                                                  // equilibrium set is the point
                                                  // shifted along these in Ln coords
};

/// Per-complex residual: total outflow rate minus total inflow rate at x.
/// All zero iff x is a complex balanced equilibrium.
std::vector<double> check_complex_balance(const Network& net, const Vec& x);

/// Complex balanced equilibrium of a weakly reversible network.
///
/// Builds the kinetic Laplacian on complexes, extracts a positive kernel
/// vector per linkage class, solves Y^T Ln(x) = ln(kernel) + class constants
/// in least squares, Newton-polishes the balance residuals, and returns the
/// minimum-norm Ln solution when the equilibrium set has positive dimension.
EquilibriumResult find_complex_balanced_equilibrium(const Network& net);

/// Point on the equilibrium manifold whose constant-history conserved values
/// match theta's. The manifold is cb.point shifted along
/// cb.equilibrium_set_directions in Ln coordinates; the conserved functionals
/// use net's own rates and delays.
Vec find_equilibrium_in_class(const Network& net, const HistoryFunction& theta,
                              const EquilibriumResult& cb);

}  // namespace crnstab
