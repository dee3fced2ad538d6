#pragma once

#include <vector>

#include "crnstab/network.hpp"

namespace crnstab {

/// Structural invariants of a reaction network: distinct complexes, linkage
/// classes of the complex graph, weak reversibility, rank of the
/// stoichiometric subspace S, deficiency, and orthonormal bases of S and
/// S-perp (the source of conserved quantities).
struct StoichiometryAnalysis {
    std::vector<Complex> complexes;       // deduplicated, first-appearance order
    std::vector<int> complex_class;       // linkage class id per complex
    int linkage_class_count = 0;
    bool weakly_reversible = false;
    int rank = 0;                         // dim S
    int deficiency = 0;                   // #complexes - #classes - rank
    std::vector<Vec> basis_S;             // orthonormal
    std::vector<Vec> basis_S_perp;        // orthonormal
};

StoichiometryAnalysis analyze_structure(const Network& net);

/// Reaction vectors product - reactant, in reaction order.
std::vector<Vec> reaction_vectors(const Network& net);

}  // namespace crnstab
