#include <doctest.h>

#include <cmath>
#include <map>

#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_chain.hpp"
#include "geoleader/random.hpp"
#include "support/oracles.hpp"

using namespace geoleader;

TEST_CASE("transition probabilities") {
  const Theta half(0.5);
  CHECK(y_transition_pmf({1, 1}, {2, 1}, half) == doctest::Approx(0.25));
  CHECK(y_transition_pmf({1, 1}, {1, 2}, half) == doctest::Approx(0.5));
  CHECK(y_transition_pmf({1, 1}, {1, 1}, half) == 0.0);
  CHECK(y_transition_pmf({3, 2}, {2, 1}, half) == 0.0);
  CHECK(y_transition_pmf({3, 2}, {3, 4}, half) == 0.0);
  for (double t : {0.2, 0.5, 0.8}) {
    const Theta theta(t);
    for (std::int64_t i = 1; i <= 20; ++i) {
      for (std::int64_t k = 1; k <= 20; ++k) {
        double s = y_transition_pmf({i, k}, {i, k}, theta) + y_transition_pmf({i, k}, {i, k + 1}, theta);
        std::int64_t j = i + 1;
        for (; j < i + 400; ++j) s += y_transition_pmf({i, k}, {j, 1}, theta);
        // remaining jumps carry q^{j-1}
        s += std::pow(theta.q(), static_cast<double>(j - 1));
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("joint law of maximum and multiplicity") {
  const Theta theta(0.5);
  const PairDist one = joint_dist_ml(1, theta);
  for (std::int64_t j = 1; j <= 20; ++j) {
    CHECK(one.at({j, 1}) == doctest::Approx(0.5 * std::pow(0.5, j - 1)).epsilon(1e-14));
  }
  CHECK(joint_dist_ml(2, theta).at({1, 2}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(joint_dist_ml(5, theta, 0.0), ConfigError);
  CHECK_THROWS_AS(joint_dist_ml(0, theta), ConfigError);

  // propagate the chain from the model definition and compare every cell
  for (double t : {0.3, 0.5, 0.7}) {
    const Theta th(t);
    oracle::YLaw law{t, 120, {}};
    law.start();
    for (int n = 1; n <= 12; ++n) {
      if (n > 1) law.step();
      const PairDist d = joint_dist_ml(n, th);
      CHECK_NOTHROW(d.validate(1e-12));
      CHECK(d.tail_bound <= 1e-15);
      for (std::size_t s = 0; s < d.support.size(); ++s) {
        const auto [j, l] = d.support[s];
        if (j > 100) continue;
        const double want = static_cast<double>(law.at(static_cast<int>(j), static_cast<int>(l)));
        CHECK(d.mass[s] == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("truncation level covers the requested tail") {
  for (std::int64_t n : {1, 10, 1000, 1000000}) {
    const Theta theta(0.4);
    const auto J = maximum_truncation(n, theta, 1e-12);
    const auto tail = [n](std::int64_t j) {
      return -std::expm1(static_cast<double>(n) * std::log1p(-std::pow(0.6, static_cast<double>(j))));
    };
    CHECK(tail(J) <= 1e-12);
    CHECK(tail(J - 1) > 1e-12);
  }
}

TEST_CASE("probability of a unique winner") {
  const Theta theta(0.5);
  CHECK(prob_unique_winner(1, theta) == 1.0);
  // enumeration of (xi1, xi2) up to 60
  double two = 0.0;
  for (int a = 1; a <= 60; ++a) {
    for (int b = 1; b <= 60; ++b) {
      if (a != b) two += std::pow(0.5, a) * std::pow(0.5, b);
    }
  }
  CHECK(prob_unique_winner(2, theta) == doctest::Approx(two).epsilon(1e-12));
  CHECK(prob_unique_winner(2, theta) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const PairDist d = joint_dist_ml(50, theta);
  double from_table = 0.0;
  for (std::size_t s = 0; s < d.support.size(); ++s) {
    if (d.support[s].second == 1) from_table += d.mass[s];
  }
  CHECK(prob_unique_winner(50, theta) == doctest::Approx(from_table).epsilon(1e-12));

  // n = 1000 against simulation (1e5 paths; a 5 standard error band)
  const int runs = 100000;
  int unique = 0;
  for (int r = 0; r < runs; ++r) {
    unique += simulate_y_path(1000, theta, derive_seed(11, r)).back().second == 1;
  }
  const double p = prob_unique_winner(1000, theta);
  CHECK(std::fabs(unique / double(runs) - p) < 5.0 * std::sqrt(p * (1 - p) / runs));
}

TEST_CASE("rounds law") {
  const Theta theta(0.5);
  const CountDist two = rounds_dist(2, theta);
  CHECK(two.at(1) == 0.0);
  CHECK(two.at(2) == doctest::Approx(0.5).epsilon(1e-14));
  const CountDist one = rounds_dist(1, theta);
  for (std::int64_t r = 1; r <= 10; ++r) CHECK(one.at(r) == doctest::Approx(std::pow(0.5, r)).epsilon(1e-14));
  CHECK_THROWS_AS(rounds_dist(3, theta, -1.0), ConfigError);
  // P(R = r) = P(M = r, L = 1) + P(M = r - 1, L >= 2)
  const PairDist ml = joint_dist_ml(9, theta);
  const CountDist r9 = rounds_dist(9, theta);
  for (std::int64_t r = 1; r <= 30; ++r) {
    double want = ml.at({r, 1});
    for (std::int64_t l = 2; l <= 9; ++l) want += ml.at({r - 1, l});
    CHECK(r9.at(r) == doctest::Approx(want).epsilon(1e-13));
  }
  CHECK(rounds_and_winners(4, 1) == PairState{4, 1});
  CHECK(rounds_and_winners(4, 3) == PairState{5, 3});
  const PairDist rw = rounds_winners_dist(9, theta);
  CHECK_NOTHROW(rw.validate());
}

TEST_CASE("coupled path") {
  const Theta theta(0.3);
  const auto path = simulate_y_path(500, theta, 99);
  CHECK(path.size() == 500);
  CHECK(path.front().second == 1);
  for (std::size_t t = 1; t < path.size(); ++t) {
    CHECK(path[t].first >= path[t - 1].first);
    CHECK(path[t].second <= static_cast<std::int64_t>(t + 1));
    if (path[t].first > path[t - 1].first) {
      CHECK(path[t].second == 1);
    } else {
      CHECK(path[t].second - path[t - 1].second >= 0);
      CHECK(path[t].second - path[t - 1].second <= 1);
    }
  }
  CHECK(simulate_y_path(500, theta, 99) == path);
  CHECK(simulate_y_path(500, theta, 100) != path);

  // M_5, L_5 against the exact law
  const Theta half(0.5);
  const PairDist d = joint_dist_ml(5, half);
  std::map<PairState, double> counts;
  const int runs = 1'000'000;
  for (int r = 0; r < runs; ++r) counts[simulate_y_path(5, half, derive_seed(5, r)).back()] += 1.0;
  std::vector<double> obs, expd;
  double seen = 0.0;
  for (std::size_t s = 0; s < d.support.size(); ++s) {
    obs.push_back(counts[d.support[s]]);
    expd.push_back(d.mass[s] * runs);
    seen += obs.back();
  }
  CHECK(seen == runs);
  const auto chi = oracle::chi_square(obs, expd, runs);
  CHECK(chi.max_z < 3.0 + 1.0);  // 3 SE per cell with a Bonferroni-sized margin
  CHECK(chi.p_value > 0.001);
}

namespace {

// (rounds, winners) law of the round-by-round protocol, by dynamic
// programming over the participant count.
std::map<PairState, double> protocol_law(std::int64_t k, const Theta& theta, int max_rounds) {
  std::map<PairState, double> out;
  std::vector<double> alive(k + 1, 0.0);
  alive[k] = 1.0;
  for (int r = 1; r <= max_rounds; ++r) {
    std::vector<double> next(k + 1, 0.0);
    for (std::int64_t c = 2; c <= k; ++c) {
      if (alive[c] == 0.0) continue;
      for (std::int64_t s = 0; s <= c; ++s) {
        const double p = alive[c] * n_transition_pmf(c, s, theta);
        if (s == 0) {
          out[{r, c}] += p;
        } else if (s == 1) {
          out[{r, 1}] += p;
        } else {
          next[s] += p;
        }
      }
    }
    alive.swap(next);
  }
  return out;
}

}  // namespace

TEST_CASE("direct election protocol") {
  const Theta theta(0.5);
  const auto lone = simulate_election(1, theta, 3);
  CHECK(lone.winners == 1);
  CHECK(lone.rounds == 0);
  CHECK_THROWS_AS(simulate_election(0, theta, 3), ConfigError);

  const auto law = protocol_law(10, theta, 80);
  const int runs = 400000;
  std::map<PairState, double> counts;
  std::vector<double> winners(11, 0.0);
  for (int r = 0; r < runs; ++r) {
    const auto e = simulate_election(10, theta, derive_seed(21, r));
    REQUIRE(e.rounds >= 1);
    REQUIRE(e.winners >= 1);
    counts[{e.rounds, e.winners}] += 1.0;
    winners[e.winners] += 1.0;
  }
  std::vector<double> obs, expd;
  for (const auto& [cell, p] : law) {
    obs.push_back(counts[cell]);
    expd.push_back(p * runs);
  }
  CHECK(oracle::chi_square(obs, expd, runs).p_value > 0.001);

  // the number of winners has the law of the multiplicity L_10
  const PairDist ml = joint_dist_ml(10, theta);
  std::vector<double> expected_l(11, 0.0);
  for (std::size_t s = 0; s < ml.support.size(); ++s) expected_l[ml.support[s].second] += ml.mass[s] * runs;
  CHECK(oracle::chi_square(winners, expected_l, runs).p_value > 0.001);
}

TEST_CASE("coupled election reads rounds off the maximum") {
  const Theta theta(0.5);
  for (int r = 0; r < 2000; ++r) {
    const auto e = simulate_coupled_election(10, theta, derive_seed(8, r));
    const auto [m, l] = e.trajectory.back();
    CHECK(e.winners == l);
    CHECK(e.rounds == (l >= 2 ? m + 1 : m));
  }
}
