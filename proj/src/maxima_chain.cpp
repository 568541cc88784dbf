#include "geoleader/maxima_chain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "geoleader/random.hpp"

namespace geoleader {

namespace {

// q^e for integer e >= 0.
double q_pow(const Theta& theta, std::int64_t e) {
  return std::exp(static_cast<double>(e) * theta.log_q());
}

// 1 - q^e without cancellation.
double one_minus_q_pow(const Theta& theta, std::int64_t e) {
  return -std::expm1(static_cast<double>(e) * theta.log_q());
}

// log P(M_n <= j) = n log(1 - q^j).
double log_max_cdf(std::int64_t n, const Theta& theta, std::int64_t j) {
  return static_cast<double>(n) * std::log1p(-q_pow(theta, j));
}

void check_n(std::int64_t n) {
  if (n < 1) throw ConfigError("sample size n must be >= 1");
}

void check_eps(double tail_eps) {
  if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw ConfigError("tail_eps must lie in (0,1)");
}

// P(M_n = j, L_n = 1).
double unique_at(std::int64_t n, const Theta& theta, std::int64_t j) {
  if (n == 1) return theta.value() * q_pow(theta, j - 1);
  if (j == 1) return 0.0;
  return std::exp(std::log(static_cast<double>(n)) + std::log(theta.value()) +
                  static_cast<double>(j - 1) * theta.log_q() +
                  static_cast<double>(n - 1) * std::log1p(-q_pow(theta, j - 1)));
}

// P(M_n = j, L_n >= 2).
double tied_at(std::int64_t n, const Theta& theta, std::int64_t j) {
  if (n == 1) return 0.0;
  const double at_most_j = std::exp(log_max_cdf(n, theta, j));
  const double below_j = j == 1 ? 0.0 : std::exp(log_max_cdf(n, theta, j - 1));
  return std::max(0.0, at_most_j - below_j - unique_at(n, theta, j));
}

}  // namespace

void MaxState::validate() const {
  if (m < 1 || i < 1 || k < 1 || k > m) {
    throw ConfigError("MaxState requires m, i, k >= 1 and k <= m");
  }
}

double y_transition_pmf(PairState from, PairState to, const Theta& theta) {
  const auto [i, k] = from;
  const auto [j, l] = to;
  if (i < 1 || k < 1 || j < 1 || l < 1) return 0.0;
  if (j > i && l == 1) return theta.value() * q_pow(theta, j - 1);
  if (j == i && l == k + 1) return theta.value() * q_pow(theta, i - 1);
  if (j == i && l == k) return one_minus_q_pow(theta, i - 1);
  return 0.0;
}

std::int64_t maximum_truncation(std::int64_t n, const Theta& theta, double tail_eps) {
  check_n(n);
  check_eps(tail_eps);
  const double target = std::log1p(-tail_eps);
  std::int64_t j = 1;
  while (log_max_cdf(n, theta, j) < target) {
    if (++j > kMaxSupport) {
      throw CertificationError("maximum_truncation: tail not certified below j = " +
                               std::to_string(kMaxSupport) + " (theta too small)");
    }
  }
  return j;
}

PairDist joint_dist_ml(std::int64_t n, const Theta& theta, double tail_eps) {
  const std::int64_t jmax = maximum_truncation(n, theta, tail_eps);
  PairDist out;
  for (std::int64_t j = 1; j <= jmax; ++j) {
    const double log_row = log_max_cdf(n, theta, j);  // (1 - q^j)^n
    if (log_row < -745.0) continue;
    // Given M_n <= j, L_n counts observations equal to j: Binomial(n, pi_j).
    const double denom = one_minus_q_pow(theta, j);
    const double pi = theta.value() * q_pow(theta, j - 1) / denom;
    const double one_minus_pi = one_minus_q_pow(theta, j - 1) / denom;
    bool seen_positive = false;
    for (std::int64_t l = 1; l <= n; ++l) {
      const double mass = std::exp(log_binomial_pmf_pq(l, n, pi, one_minus_pi) + log_row);
      if (mass > 0.0) {
        out.support.emplace_back(j, l);
        out.mass.push_back(mass);
        seen_positive = true;
      } else if (seen_positive && static_cast<double>(l) > static_cast<double>(n) * pi) {
        break;
      }
    }
  }
  out.tail_bound = -std::expm1(log_max_cdf(n, theta, jmax));
  return out;
}

double prob_unique_winner(std::int64_t n, const Theta& theta) {
  check_n(n);
  if (n == 1) return 1.0;
  // Terms are bounded by n theta q^{j-1}, so the tail after J is at most n q^J.
  const double log_n = std::log(static_cast<double>(n));
  double sum = 0.0;
  for (std::int64_t j = 2;; ++j) {
    sum += unique_at(n, theta, j);
    const double log_tail = log_n + static_cast<double>(j) * theta.log_q();
    if (log_tail < std::log(1e-20) + std::log(std::max(sum, 1e-300))) break;
  }
  return sum;
}

CountDist rounds_dist(std::int64_t n, const Theta& theta, double tail_eps) {
  const std::int64_t jmax = maximum_truncation(n, theta, tail_eps);
  CountDist out;
  double tied_prev = 0.0;
  for (std::int64_t r = 1; r <= jmax; ++r) {
    out.support.push_back(r);
    out.mass.push_back(unique_at(n, theta, r) + tied_prev);
    tied_prev = tied_at(n, theta, r);
  }
  // P(M > jmax) plus the part of R = jmax + 1 coming from a tie at jmax.
  out.tail_bound = -std::expm1(log_max_cdf(n, theta, jmax)) + tied_prev;
  return out;
}

PairState rounds_and_winners(std::int64_t maximum, std::int64_t multiplicity) {
  return {multiplicity == 1 ? maximum : maximum + 1, multiplicity};
}

PairDist rounds_winners_dist(std::int64_t n, const Theta& theta, double tail_eps) {
  const PairDist ml = joint_dist_ml(n, theta, tail_eps);
  std::map<PairState, double> table;
  for (std::size_t c = 0; c < ml.support.size(); ++c) {
    table[rounds_and_winners(ml.support[c].first, ml.support[c].second)] += ml.mass[c];
  }
  PairDist out;
  for (const auto& [s, mass] : table) {
    out.support.push_back(s);
    out.mass.push_back(mass);
  }
  out.tail_bound = ml.tail_bound;
  return out;
}

std::vector<PairState> simulate_y_path(std::int64_t n_max, const Theta& theta, std::uint64_t seed) {
  check_n(n_max);
  Rng rng(seed);
  std::vector<PairState> path;
  path.reserve(static_cast<std::size_t>(n_max));
  std::int64_t maximum = 0;
  std::int64_t multiplicity = 0;
  for (std::int64_t t = 1; t <= n_max; ++t) {
    const std::int64_t xi = sample_geometric(rng, theta);
    if (xi > maximum) {
      maximum = xi;
      multiplicity = 1;
    } else if (xi == maximum) {
      ++multiplicity;
    }
    path.emplace_back(maximum, multiplicity);
  }
  return path;
}

ElectionOutcome simulate_election(std::int64_t k, const Theta& theta, std::uint64_t seed) {
  if (k < 1) throw ConfigError("an election needs at least one participant");
  ElectionOutcome out;
  if (k == 1) return out;
  Rng rng(seed);
  std::int64_t remaining = k;
  while (true) {
    ++out.rounds;
    std::int64_t stay = 0;
    for (std::int64_t p = 0; p < remaining; ++p) {
      if (uniform_open(rng) >= theta.value()) ++stay;
    }
    if (stay == 0) {
      out.winners = remaining;
      return out;
    }
    if (stay == 1) {
      out.winners = 1;
      return out;
    }
    remaining = stay;
  }
}

ElectionOutcome simulate_coupled_election(std::int64_t n, const Theta& theta, std::uint64_t seed) {
  ElectionOutcome out;
  out.trajectory = simulate_y_path(n, theta, seed);
  const auto [maximum, multiplicity] = out.trajectory.back();
  std::tie(out.rounds, out.winners) = rounds_and_winners(maximum, multiplicity);
  return out;
}

}  // namespace geoleader
