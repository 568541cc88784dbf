#pragma once

#include <cstdint>
#include <vector>

#include "geoleader/numerics.hpp"

namespace geoleader {

/// One round of the election for the participant count: Binomial(i, 1-theta).
double n_transition_pmf(std::int64_t i, std::int64_t j, const Theta& theta);

/// r-round law: Binomial(j_start, (1-theta)^r) at i. Stable for j_start up to ~1e13.
double n_step_pmf(std::int64_t j_start, std::int64_t rounds, std::int64_t i, const Theta& theta);

/// Participant counts N_1 = j_start, N_2, ... down to and including the first 0.
std::vector<std::int64_t> simulate_n_path(std::int64_t j_start, const Theta& theta,
                                          std::uint64_t seed);

/// Law of T = min{n >= 1 : N_n <= 1} with N_1 = j_start; the number of coin
/// rounds played is T - 1. Mass beyond `horizon` goes to tail_bound, which equals
/// P(Binomial(j_start, (1-theta)^{horizon-1}) >= 2).
/// Uses dynamic programming over counts for j_start <= kDurationDpLimit and the
/// monotone-path closed form P(T <= t) = P(Binomial(j_start, (1-theta)^{t-1}) <= 1)
/// above it.
CountDist duration_dist(std::int64_t j_start, const Theta& theta, std::int64_t horizon);

inline constexpr std::int64_t kDurationDpLimit = 400;

/// Dynamic-programming route only.
CountDist duration_dist_dp(std::int64_t j_start, const Theta& theta, std::int64_t horizon);

/// Closed-form route; `j_start` may be any real >= 0 (used for populations
/// beyond the integer range).
CountDist duration_dist_closed(double j_start, const Theta& theta, std::int64_t horizon);

/// Shifts a duration law to the number of coin rounds, T - 1.
CountDist rounds_from_duration(const CountDist& duration);

}  // namespace geoleader
