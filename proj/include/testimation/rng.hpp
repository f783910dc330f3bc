#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace testimation {

using Engine = std::mt19937_64;

/// Mixes a base seed with a path of indices (replication, cell, ...) so every
/// job owns an independent stream regardless of execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

/// Fills `out` with independent N(0, 1) draws.
void fill_standard_normal(Engine& engine, std::span<double> out);

}  // namespace testimation
