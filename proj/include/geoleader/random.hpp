#pragma once

#include <cstdint>
#include <random>

#include "geoleader/numerics.hpp"

namespace geoleader {

/// Every simulation takes one of these, seeded explicitly.
using Rng = std::mt19937_64;

/// Seed for the `stream`-th independent task derived from a master seed.
/// Rule: splitmix64(master + 0x9E3779B97F4A7C15 * (stream + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Uniform on the open interval (0,1) with 53 random bits.
double uniform_open(Rng& rng);

/// Geometric on {1,2,...} with P(X = j) = theta (1-theta)^{j-1}, by inversion:
/// ceil(log U / log(1-theta)).
std::int64_t sample_geometric(Rng& rng, const Theta& theta);

/// Geometric conditioned on {1,...,top}, by inversion of its CDF.
std::int64_t sample_truncated_geometric(Rng& rng, const Theta& theta, std::int64_t top);

/// Exponential with the given rate, by inversion.
double sample_exponential(Rng& rng, double rate);

}  // namespace geoleader
