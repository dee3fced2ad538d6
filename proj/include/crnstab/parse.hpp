#pragma once

#include <string>
#include <string_view>

#include "crnstab/error.hpp"
#include "crnstab/network.hpp"

namespace crnstab {

/// Parses the reaction network text format:
///
///   # comment
///   species: A, B            (optional; fixes species order and set)
///   3A -> A + 2B : k=1, tau=1/10
///   A + 2B -> 2A + B : k=2, tau=1
///
/// Numbers are decimals or fractions "p/q"; both are read as exact rationals.
/// An omitted tau defaults to 0; an omitted rate is an error. Without a
/// species header the species universe is the names in order of appearance.
Network parse_network(std::string_view text);

/// Canonical text form; parse_network(format_network(n)) reproduces n
/// structurally, including exact rational delays and rates.
std::string format_network(const Network& net);

/// One complex in DSL syntax ("2A + B", "0").
std::string format_complex(const std::vector<std::string>& species, const Complex& c);

/// Parses a standalone decimal or fraction literal into an exact rational.
Rational parse_number(std::string_view text);

}  // namespace crnstab
