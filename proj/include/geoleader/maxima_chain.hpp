#pragma once

#include <cstdint>
#include <vector>

#include "geoleader/numerics.hpp"

namespace geoleader {

/// Space-time state (m, i, k) of the maxima chain: after m observations the
/// running maximum is i and it has been seen k times.
struct MaxState {
  std::int64_t m = 1;
  std::int64_t i = 1;
  std::int64_t k = 1;

  /// Throws ConfigError unless m, i, k >= 1 and k <= m.
  void validate() const;
  /// A maximum of 1 means every observation equalled 1, so k must equal m.
  bool reachable() const { return m >= 1 && i >= 1 && k >= 1 && k <= m && (i > 1 || k == m); }

  friend bool operator==(const MaxState&, const MaxState&) = default;
};

/// Outcome of one election. `rounds` counts coin-tossing rounds; a lone initial
/// participant wins after 0 rounds.
struct ElectionOutcome {
  std::int64_t rounds = 0;
  std::int64_t winners = 1;
  /// (M_t, L_t) for the coupled representation; empty for the direct protocol.
  std::vector<PairState> trajectory;
};

/// One-step law of (M, L): from (i,k) to (j,l).
double y_transition_pmf(PairState from, PairState to, const Theta& theta);

/// Largest truncation level tabulated before giving up.
inline constexpr std::int64_t kMaxSupport = 2'000'000;

/// Smallest J with P(M_n <= J) >= 1 - tail_eps. Throws CertificationError past
/// kMaxSupport.
std::int64_t maximum_truncation(std::int64_t n, const Theta& theta, double tail_eps);

/// Exact joint law of (M_n, L_n) over j <= J_max, support ordered (j, l).
PairDist joint_dist_ml(std::int64_t n, const Theta& theta, double tail_eps = 1e-15);

/// P(L_n = 1), the probability that the election has a single winner.
double prob_unique_winner(std::int64_t n, const Theta& theta);

/// Law of R_n = M_n + [L_n >= 2].
CountDist rounds_dist(std::int64_t n, const Theta& theta, double tail_eps = 1e-15);

/// (R, L) pair for a maximum M with multiplicity L.
PairState rounds_and_winners(std::int64_t maximum, std::int64_t multiplicity);

/// Exact joint law of (R_n, L_n), obtained from joint_dist_ml.
PairDist rounds_winners_dist(std::int64_t n, const Theta& theta, double tail_eps = 1e-15);

/// Running maximum and multiplicity of i.i.d. geometric draws, t = 1..n_max.
std::vector<PairState> simulate_y_path(std::int64_t n_max, const Theta& theta, std::uint64_t seed);

/// Round-by-round protocol: every remaining participant tosses and leaves on
/// heads. Stops when one participant remains, or when everyone still in obtains
/// heads in the same round (that round counts; they all win).
ElectionOutcome simulate_election(std::int64_t k, const Theta& theta, std::uint64_t seed);

/// The same election read off the coupled maxima path of length n.
ElectionOutcome simulate_coupled_election(std::int64_t n, const Theta& theta, std::uint64_t seed);

}  // namespace geoleader
