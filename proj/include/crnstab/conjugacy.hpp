#pragma once

#include <map>
#include <string>
#include <vector>

#include "crnstab/network.hpp"

namespace crnstab {

/// Positive diagonal change of coordinates x = Q x~. Entries are exact
/// rationals so constructed realizations keep exact rates and product
/// complexes; field arithmetic uses the double values.
struct DiagonalMap {
    std::vector<Rational> q;

    explicit DiagonalMap(std::vector<Rational> entries = {});
    std::size_t size() const { return q.size(); }
    Vec to_doubles() const;
    bool is_identity() const;
    bool is_scalar() const;
};

/// Canonical sparse form of the delayed mass-action right-hand side: a map
/// from (reactant exponent vector, delay) to the vector coefficient of the
/// monomial x(t - delay)^y. Two networks generate the same dynamics iff their
/// fields agree, which makes this the ground truth for dynamic equivalence
/// and linear-conjugacy checks.
struct DelayedMonomialField {
    struct Key {
        Complex exponents;
        Rational delay;
        friend bool operator==(const Key&, const Key&) = default;
        friend std::strong_ordering operator<=>(const Key&, const Key&) = default;
    };

    std::vector<std::string> species;  // defines coefficient component order
    std::map<Key, Vec> terms;

    void add(const Key& k, const Vec& coeff);
    /// Drops terms whose coefficient vector is identically zero.
    void prune();
    /// Same field with species (and coefficient components) reordered.
    DelayedMonomialField reordered(const std::vector<std::string>& order) const;
};

DelayedMonomialField delayed_field(const Network& net);

/// Field of the conjugate system under x = Q x~: every term (y, tau) -> c
/// becomes (y, tau) -> (prod_j q_j^-y_j) Q c.
DelayedMonomialField transform_field(const DelayedMonomialField& f, const DiagonalMap& q);
DelayedMonomialField transform_field(const DelayedMonomialField& f, const Vec& q);

struct RealizationResult {
    Network network;                   // species reordered so q_1 is maximal
    DiagonalMap q;                     // as supplied, in the input species order
    std::vector<std::size_t> species_permutation;  // output position -> input position
    std::vector<int> reaction_origin;  // per output reaction: source reaction index
    std::vector<bool> reaction_delayed;
    int pruned_reactions = 0;          // undelayed companions with zero net change
    int split_reactions = 0;           // degenerate delayed reactions emitted as a pair
};

/// Builds a delayed network whose dynamics are the Q-conjugate of the input's.
///
/// Scalar q keeps the input reactions and rescales rates. Otherwise species
/// are reordered so the largest q comes first (ties: smallest index), each
/// reaction contributes one delayed reaction with the same reactant and delay
/// plus one undelayed companion, and companions with zero net change are
/// dropped. If the delayed product would collide with the reactant the
/// reaction is emitted as two delayed halves (products 2y and 0) so the
/// network never contains a self-loop.
RealizationResult construct_lcdcb(const Network& dcb, const DiagonalMap& q);

struct ConjugacyReport {
    bool conjugate = false;
    std::vector<std::string> mismatches;
};

/// True iff delayed_field(a) equals transform_field(delayed_field(b), q)
/// term by term: coefficients within tol, delays exactly. Species are aligned
/// by name; q is given in b's species order.
ConjugacyReport check_linear_conjugacy(const Network& a, const Network& b,
                                       const DiagonalMap& q, double tol = 1e-12);
ConjugacyReport check_linear_conjugacy(const Network& a, const Network& b,
                                       const Vec& q, double tol = 1e-12);

struct ConjugacySolve {
    bool feasible = false;
    Vec q;               // witness diagonal when feasible (b's species order)
    std::string detail;  // witness summary or infeasibility reason
};

/// Decides "is a linear conjugate to b for some positive diagonal Q": solves
/// for Q in log space from matching monomial keys and verifies the candidate,
/// or reports a support/sign mismatch that rules out every Q.
ConjugacySolve solve_conjugacy(const Network& a, const Network& b);

}  // namespace crnstab
