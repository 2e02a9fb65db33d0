#pragma once

#include <string>

#include "omnipd/common.hpp"

namespace omnipd {

/// Netlist-text generators for the shipped test designs. All output is
/// deterministic for a given parameter set and parses against the shipped
/// library cell names.

/// Registered ripple-carry adder: input DFFs, FA chain, output DFFs.
std::string make_ripple_adder(int bits);

/// Registered array multiplier (n x n partial products, adder reduction).
std::string make_array_multiplier(int n);

/// LFSR-fed substitution/permutation round: XOR/MUX-heavy with a seeded
/// random permutation between layers, standing in for a crypto core.
std::string make_crypto_round(int width, int layers, std::uint64_t seed);

/// Dense random logic with long-range connections; the congestion fixture.
std::string make_congested(int cells, std::uint64_t seed);

/// Small random netlist for property suites: <= max_cells cells, random
/// masters/topology, valid by construction.
std::string make_random_netlist(int max_cells, std::uint64_t seed);

}  // namespace omnipd
