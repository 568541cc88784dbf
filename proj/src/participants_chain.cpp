#include "geoleader/participants_chain.hpp"

#include <cmath>
#include <random>

#include "geoleader/random.hpp"

namespace geoleader {

namespace {

void check_horizon(std::int64_t horizon) {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
}

// P(Binomial(j, p) >= 2) with 1 - p = p_comp, for real j >= 0.
double at_least_two(double j, double p, double log_p_comp) {
  if (j < 2.0 || p == 0.0) return 0.0;
  // P(<= 1) = (1-p)^j + j p (1-p)^{j-1}
  const double log_none = j * log_p_comp;
  const double log_one = std::log(j) + std::log(p) + (j - 1.0) * log_p_comp;
  const double at_most_one = std::exp(log_none) + std::exp(log_one);
  if (at_most_one > 0.5) {
    // Near 1: take log P(<= 1) = j log(1-p) + log1p(j p / (1-p)) and use expm1.
    return std::max(0.0, -std::expm1(std::log1p(std::exp(log_one - log_none)) + log_none));
  }
  return 1.0 - at_most_one;
}

}  // namespace

double n_transition_pmf(std::int64_t i, std::int64_t j, const Theta& theta) {
  return thinning_pmf(i, j, theta);
}

double n_step_pmf(std::int64_t j_start, std::int64_t rounds, std::int64_t i, const Theta& theta) {
  if (j_start < 0 || rounds < 0) throw ConfigError("n_step_pmf requires j_start, rounds >= 0");
  if (rounds == 0) return i == j_start ? 1.0 : 0.0;
  const double log_p = static_cast<double>(rounds) * theta.log_q();
  return std::exp(log_binomial_pmf_pq(i, j_start, std::exp(log_p), -std::expm1(log_p)));
}

std::vector<std::int64_t> simulate_n_path(std::int64_t j_start, const Theta& theta,
                                          std::uint64_t seed) {
  if (j_start < 0) throw ConfigError("j_start must be >= 0");
  Rng rng(seed);
  std::vector<std::int64_t> path{j_start};
  while (path.back() > 0) {
    std::binomial_distribution<std::int64_t> thin(path.back(), theta.q());
    path.push_back(thin(rng));
  }
  return path;
}

CountDist duration_dist_dp(std::int64_t j_start, const Theta& theta, std::int64_t horizon) {
  if (j_start < 0) throw ConfigError("j_start must be >= 0");
  check_horizon(horizon);
  CountDist out;
  if (j_start <= 1) {
    out.support = {1};
    out.mass = {1.0};
    return out;
  }
  // Row r of the thinning kernel restricted to counts 0..j_start.
  const auto n = static_cast<std::size_t>(j_start);
  std::vector<std::vector<double>> kernel(n + 1);
  for (std::size_t i = 2; i <= n; ++i) {
    kernel[i].resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j) {
      kernel[i][j] = thinning_pmf(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j), theta);
    }
  }
  std::vector<double> alive(n + 1, 0.0);  // mass on counts >= 2 not yet absorbed
  alive[n] = 1.0;
  out.support.push_back(1);
  out.mass.push_back(0.0);
  for (std::int64_t t = 2; t <= horizon; ++t) {
    std::vector<double> next(n + 1, 0.0);
    double absorbed = 0.0;
    for (std::size_t i = 2; i <= n; ++i) {
      if (alive[i] == 0.0) continue;
      absorbed += alive[i] * (kernel[i][0] + kernel[i][1]);
      for (std::size_t j = 2; j <= i; ++j) next[j] += alive[i] * kernel[i][j];
    }
    alive.swap(next);
    out.support.push_back(t);
    out.mass.push_back(absorbed);
  }
  double remaining = 0.0;
  for (double a : alive) remaining += a;
  out.tail_bound = remaining;
  return out;
}

CountDist duration_dist_closed(double j_start, const Theta& theta, std::int64_t horizon) {
  if (!(j_start >= 0.0)) throw ConfigError("j_start must be >= 0");
  check_horizon(horizon);
  CountDist out;
  // S(t) = P(T > t) = P(N_t >= 2) with N_t ~ Binomial(j_start, q^{t-1}).
  const auto survival = [&](std::int64_t t) {
    const double log_p = static_cast<double>(t - 1) * theta.log_q();
    const double p = std::exp(log_p);
    return at_least_two(j_start, p, std::log1p(-p));
  };
  double prev = 1.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double s = survival(t);
    out.support.push_back(t);
    out.mass.push_back(std::max(0.0, prev - s));
    prev = s;
  }
  out.tail_bound = prev;
  return out;
}

CountDist duration_dist(std::int64_t j_start, const Theta& theta, std::int64_t horizon) {
  if (j_start < 0) throw ConfigError("j_start must be >= 0");
  if (j_start <= kDurationDpLimit) return duration_dist_dp(j_start, theta, horizon);
  return duration_dist_closed(static_cast<double>(j_start), theta, horizon);
}

CountDist rounds_from_duration(const CountDist& duration) {
  CountDist out = duration;
  for (auto& t : out.support) t -= 1;
  return out;
}

}  // namespace geoleader
