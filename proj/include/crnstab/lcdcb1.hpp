#pragma once

#include <string>
#include <vector>

#include "crnstab/network.hpp"

namespace crnstab {

/// Outcome of matching a delayed network against a reference whose reaction
/// vectors it must shrink: per reaction, equal reactant complexes,
/// v_i = b_i v~_i with b_i = (reference rate)/(candidate rate), and b_i <= 1.
struct Lcdcb1Result {
    std::vector<int> pairing;    // candidate reaction i -> reference reaction index
    std::vector<Rational> b;     // per candidate reaction
    bool accepted = false;
    std::string rejection_reason;
    /// False when the b_i <= 1 condition was waived: the dissipation theorem
    /// needs kappa_i >= kappa~_i, so such classifications carry no stability
    /// guarantee.
    bool stability_applicable = false;
};

/// Classifies candidate against reference. Reactions are paired structurally:
/// grouped by reactant complex, then matched by positive collinearity of the
/// reaction vectors; an ambiguous group is rejected rather than guessed.
/// Throws on species-set or reaction-count mismatch.
Lcdcb1Result classify_lcdcb1(const Network& candidate, const Network& reference,
                             bool allow_b_greater_1 = false);

/// The companion delayed network of an accepted classification: reference
/// complexes and rates with delays tau_i / b_i. Its constant-history
/// conserved values coincide with the candidate's.
Network companion_dcb(const Network& candidate, const Lcdcb1Result& result,
                      const Network& reference);

}  // namespace crnstab
