#include "geoleader/random.hpp"

#include <algorithm>
#include <cmath>

namespace geoleader {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t sample_geometric(Rng& rng, const Theta& theta) {
  const double x = std::ceil(std::log(uniform_open(rng)) / theta.log_q());
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(x));
}

std::int64_t sample_truncated_geometric(Rng& rng, const Theta& theta, std::int64_t top) {
  if (top < 1) throw ConfigError("truncated geometric needs a nonempty range");
  // P(X <= j) = (1 - q^j) / (1 - q^top)
  const double mass = -std::expm1(static_cast<double>(top) * theta.log_q());
  const double u = uniform_open(rng);
  const double x = std::ceil(std::log1p(-u * mass) / theta.log_q());
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(x), 1, top);
}

double sample_exponential(Rng& rng, double rate) { return -std::log(uniform_open(rng)) / rate; }

}  // namespace geoleader
