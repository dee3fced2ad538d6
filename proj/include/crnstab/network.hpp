#pragma once

#include <compare>
#include <string>
#include <vector>

#include "crnstab/rational.hpp"

namespace crnstab {

using Vec = std::vector<double>;

/// Stoichiometric coefficient vector of one side of a reaction.
///
/// Coefficients are rational: parsed complexes are non-negative integers, but
/// product complexes of constructed conjugate realizations may be fractional.
/// Reactant complexes must stay integral so mass-action monomials are
/// well-defined; Network::validate enforces that split.
struct Complex {
    std::vector<Rational> coeffs;

    std::size_t size() const { return coeffs.size(); }
    bool is_integral() const;
    bool is_zero() const;
    /// Exponent vector for monomial evaluation; throws if not integral.
    std::vector<long> integer_exponents() const;
    Vec as_doubles() const;

    friend bool operator==(const Complex&, const Complex&) = default;
    friend std::strong_ordering operator<=>(const Complex&, const Complex&) = default;
};

struct Reaction {
    Complex reactant;
    Complex product;
    Rational rate;   // > 0
    Rational delay;  // >= 0
};

/// A delayed mass-action reaction network: ordered species names plus
/// reactions carrying rate constants and constant time delays.
struct Network {
    std::vector<std::string> species;
    std::vector<Reaction> reactions;

    std::size_t species_count() const { return species.size(); }
    std::size_t reaction_count() const { return reactions.size(); }

    /// Checks all structural invariants; throws Error on the first violation.
    void validate() const;

    Rational max_delay() const;
    /// Index of a species name, or -1.
    int species_index(const std::string& name) const;
};

/// x^y = prod_j x_j^{y_j} with integer exponents; 0^0 = 1.
double monomial(const Vec& x, const std::vector<long>& exponents);

/// Same network with species (and complex coefficients) listed in the given
/// order; order must be a permutation of net.species.
Network reordered_network(const Network& net, const std::vector<std::string>& order);

}  // namespace crnstab
