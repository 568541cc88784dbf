#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <cmath>

#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_boundary.hpp"
#include "geoleader/participants_chain.hpp"
#include "support/oracles.hpp"

using namespace geoleader;

namespace {

// e^{-ic} E1(e^{-c}) / (i-1)!, from substituting u = e^{-w}
double numerator_closed_form(int i, double c) {
  return std::exp(-i * c) * boost::math::expint(1, std::exp(-c)) / boost::math::factorial<double>(i - 1);
}

// Poisson(i; y) at y = e^{-(c - H_i + gamma)}: the same substitution for the
// shifted f_{i+1} law
double boundary_closed_form(int i, double c) {
  const double y = std::exp(-(c - harmonic_number(i) + euler_gamma()));
  return std::exp(i * std::log(y) - y - std::lgamma(i + 1.0));
}

double zeta_closed_form(double zeta1, double theta, int n) {
  return 1.0 / (1.0 + (1.0 / zeta1 - 1.0) * std::pow(1.0 - theta, -(n - 1.0)));
}

}  // namespace

TEST_CASE("reference chain marginals") {
  const Theta half(0.5);
  const BackwardChainSpec spec(half, 0.5);
  CHECK(marginal_param(spec, 1) == 0.5);
  CHECK(marginal_param(spec, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(BackwardChainSpec(Theta(0.3)).zeta1 == 0.3);
  CHECK_THROWS_AS(BackwardChainSpec(half, 0.0), ConfigError);
  CHECK_THROWS_AS(BackwardChainSpec(half, 1.0), ConfigError);
  CHECK_THROWS_AS(marginal_param(spec, 0), ConfigError);
  for (double t : {0.3, 0.5}) {
    const Theta theta(t);
    const BackwardChainSpec s(theta, 0.4);
    for (int n = 1; n <= 30; ++n) {
      const double zn = marginal_param(s, n);
      CHECK(zn == doctest::Approx(zeta_closed_form(0.4, t, n)).epsilon(1e-12));
      CHECK(zn > 0.0);
      CHECK(zn < 1.0);
    }
    // thinning Geo0(zeta_{n+1}) gives Geo0(zeta_n)
    for (int n : {1, 4}) {
      const double zn = marginal_param(s, n), zn1 = marginal_param(s, n + 1);
      for (int j = 0; j <= 200; ++j) {
        double thinned = 0.0;
        for (int i = j; i <= 3000; ++i) thinned += geo0_pmf(zn1, i) * backward_transition_pmf(i, j, theta);
        CHECK(std::fabs(thinned - geo0_pmf(zn, j)) < 1e-12);
      }
    }
  }
}

TEST_CASE("backward and forward transitions") {
  const Theta half(0.5);
  CHECK(backward_transition_pmf(2, 2, half) == doctest::Approx(0.25));
  CHECK(backward_transition_pmf(2, 3, half) == 0.0);
  for (int i = 0; i <= 50; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) {
      s += backward_transition_pmf(i, j, Theta(0.3));
      CHECK(backward_transition_pmf(i, j, Theta(0.3)) == doctest::Approx(thinning_pmf(i, j, Theta(0.3))));
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (double t : {0.2, 0.5, 0.8}) {
    const BackwardChainSpec spec{Theta(t)};
    for (int n = 1; n <= 12; n += 5) {
      const double zn = marginal_param(spec, n), zn1 = marginal_param(spec, n + 1);
      for (int j = 0; j <= 30; ++j) {
        const CertifiedSum row = forward_row_sum(spec, n, j);
        CHECK(row.value == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(row.tail_bound <= 1e-15);
        for (int i = j; i <= j + 20; ++i) {
          // Bayes round trip
          const double lhs = geo0_pmf(zn, j) * forward_transition_pmf(spec, n, j, i);
          const double rhs = backward_transition_pmf(i, j, Theta(t)) * geo0_pmf(zn1, i);
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
        CHECK(forward_transition_pmf(spec, n, j, j - 1) == 0.0);
      }
    }
  }

  // P(X_2 = 0 | X_1 = 0) by simulating X_2 ~ Geo0(zeta_2) and thinning it
  const BackwardChainSpec spec(half, 0.5);
  const double z2 = marginal_param(spec, 2);
  Rng rng(42);
  std::geometric_distribution<std::int64_t> geo0(z2);
  std::int64_t kept = 0, hit = 0;
  for (int r = 0; r < 1'000'000; ++r) {
    const auto x2 = geo0(rng);
    std::binomial_distribution<std::int64_t> thin(x2, 0.5);
    if (thin(rng) != 0) continue;
    ++kept;
    hit += x2 == 0;
  }
  const double p = forward_transition_pmf(spec, 1, 0, 0);
  CHECK(p == doctest::Approx(z2 / 0.5).epsilon(1e-12));
  CHECK(std::fabs(hit / double(kept) - p) < 3.0 * std::sqrt(p * (1 - p) / kept));
}

TEST_CASE("c_infinity") {
  const Theta half(0.5);
  CHECK(c_infinity(1, 1, 0.0, half) == doctest::Approx(1.0 - euler_gamma() - std::log(2.0)).epsilon(1e-14));
  CHECK(c_infinity(1, 1, 0.0, half) == doctest::Approx(-0.2703629).epsilon(1e-6));
  CHECK(c_infinity(2, 3, 0.0, half) < c_infinity(1, 3, 0.0, half));
  CHECK(c_infinity(2, 3, 0.5, half) < c_infinity(2, 3, 0.0, half));
  CHECK(c_infinity(2, 4, 0.0, half) > c_infinity(2, 3, 0.0, half));
  for (double z : {-1.3, 0.0, 0.7}) {
    CHECK(c_infinity(3, 2, z + 1.0, half) == doctest::Approx(c_infinity(4, 2, z, half)).epsilon(1e-14));
    CHECK(kernel_numerator(2, c_infinity(3, 2, z + 1.0, half)) ==
          doctest::Approx(kernel_numerator(2, c_infinity(4, 2, z, half))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(c_infinity(0, 1, 0.0, half), ConfigError);
  CHECK_THROWS_AS(c_infinity(1, 0, 0.0, half), ConfigError);
}

TEST_CASE("kernel numerator") {
  CHECK(kernel_numerator(1, 0.0) == doctest::Approx(0.2193839).epsilon(1e-7));
  for (int i = 1; i <= 10; ++i) {
    for (double c = -5.0; c <= 5.0; c += 0.25) {
      CHECK(std::fabs(kernel_numerator(i, c) - numerator_closed_form(i, c)) < 1e-11);
      CHECK(std::fabs(boundary_numerator(i, c) - boundary_closed_form(i, c)) < 1e-11);
    }
  }
  CHECK(kernel_numerator(2, -60.0) < 1e-12);
  CHECK(kernel_numerator(2, 60.0) < 1e-12);
  CHECK(boundary_numerator(2, -60.0) < 1e-12);
  CHECK(boundary_numerator(2, 60.0) < 1e-12);
  CHECK_THROWS_AS(kernel_numerator(0, 0.0), ConfigError);

  // Monte Carlo: W with density f_i plus an independent Exp(i) gap
  Rng rng(5);
  const int runs = 200000;
  for (int i = 1; i <= 5; ++i) {
    for (double c : {-2.0, 0.0, 2.0}) {
      int hit = 0;
      for (int r = 0; r < runs; ++r) {
        const double w = sample_w(i, rng);
        hit += w < c && c < w + sample_exponential(rng, i);
      }
      const double p = kernel_numerator(i, c);
      CHECK(std::fabs(hit / double(runs) - p) < 3.0 * std::sqrt(p * (1 - p) / runs) + 1e-12);
    }
  }
}

TEST_CASE("samplers for the Gumbel-type laws") {
  Rng rng(77);
  const int runs = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double w = sample_w(1, rng);
    s += w;
    s2 += w * w;
  }
  const double mean = s / runs;
  CHECK(std::fabs(mean - euler_gamma()) < 3.0 * std::sqrt((s2 / runs - mean * mean) / runs));

  for (int i : {1, 2, 5}) {
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_w(i, rng);
    CHECK(oracle::ks_statistic(xs, [i](double x) { return cdf_f(i, x); }) < oracle::ks_critical(xs.size()));
  }
  CHECK(sample_w(3, std::uint64_t{9}) == sample_w(3, std::uint64_t{9}));
}

TEST_CASE("martingale partial sums follow the shifted limit law") {
  Rng rng(123);
  for (int i : {1, 3}) {
    std::vector<double> xs(2000);
    for (auto& x : xs) x = sample_martingale_partial_sum(i, 20000, rng);
    const double d_limit = oracle::ks_statistic(xs, [i](double x) { return limit_cdf_w(i, x); });
    CHECK(d_limit < oracle::ks_critical(xs.size()));
    // and not the unshifted f_i law
    const double d_fi = oracle::ks_statistic(xs, [i](double x) { return cdf_f(i, x); });
    CHECK(d_fi > 3.0 * oracle::ks_critical(xs.size()));
  }
  for (int i = 1; i <= 6; ++i) {
    for (double x = -3.0; x <= 6.0; x += 0.5) {
      CHECK(limit_density_w(i, x) == doctest::Approx(density_f(i + 1, x - harmonic_number(i) + euler_gamma())));
    }
  }
}

TEST_CASE("exponential order statistics") {
  const auto v = exp_order_stats(200, std::uint64_t{3});
  REQUIRE(v.size() == 200);
  for (std::size_t s = 1; s < v.size(); ++s) CHECK(v[s] > v[s - 1]);
  CHECK(exp_order_stats(20, std::uint64_t{3}) == exp_order_stats(20, std::uint64_t{3}));

  Rng rng(8);
  const int runs = 100000;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double top = exp_order_stats(100, rng).back();
    s += top;
    s2 += top * top;
  }
  const double mean = s / runs;
  CHECK(std::fabs(mean - harmonic_number(100)) < 3.0 * std::sqrt((s2 / runs - mean * mean) / runs));

  // order statistics of i.i.d. exponentials, n = 50
  const int reps = 20000;
  for (int index : {0, 24, 49}) {
    std::vector<double> a(reps), b(reps);
    std::exponential_distribution<double> e(1.0);
    for (int r = 0; r < reps; ++r) {
      a[r] = exp_order_stats(50, rng)[index];
      std::vector<double> iid(50);
      for (auto& x : iid) x = e(rng);
      std::sort(iid.begin(), iid.end());
      b[r] = iid[index];
    }
    CHECK(oracle::ks_two_sample(a, b) < oracle::ks_critical(reps, reps));
  }
}

TEST_CASE("participant-chain Martin kernels") {
  const Theta half(0.5);
  const BackwardChainSpec spec(half, 0.5);
  CHECK(extended_kernel_n(spec, 3, 2, NBoundaryPoint::diamond()) == 0.0);
  CHECK(NBoundaryPoint::diamond().is_diamond());
  CHECK(NBoundaryPoint::real(0.25).z() == 0.25);
  for (int m = 1; m <= 4; ++m) {
    for (int i = 1; i <= 6; ++i) {
      for (double z : {-3.0, 0.0, 2.5}) CHECK(extended_kernel_n(spec, m, i, NBoundaryPoint::real(z)) > 0.0);
    }
  }
  CHECK(finite_kernel_n(spec, 1, 5, 4, 3) == 0.0);
  CHECK_THROWS_AS(finite_kernel_n(spec, 4, 1, 4, 3), ConfigError);
  // finite kernel by definition at small sizes
  CHECK(finite_kernel_n(spec, 2, 1, 4, 3) ==
        doctest::Approx(n_step_pmf(3, 2, 1, half) / geo0_pmf(marginal_param(spec, 2), 1)).epsilon(1e-13));

  for (double z : {-0.4, 0.0, 0.3}) {
    for (int m = 1; m <= 3; ++m) {
      for (int i = 1; i <= 3; ++i) {
        const double limit = extended_kernel_n(spec, m, i, NBoundaryPoint::real(z));
        double prev = INFINITY;
        for (int k : {10, 20, 30, 40}) {
          const auto j = static_cast<std::int64_t>(std::floor(std::pow(2.0, k + z) + 0.5));
          const double err = std::fabs(finite_kernel_n(spec, m, i, k, j) - limit);
          CHECK(err <= prev + 1e-12);
          prev = err;
        }
        CHECK(prev < 1e-3);
      }
    }
  }
  // j_k = 2^{k + (-1)^k}: two subsequential limits, at z = +1 and z = -1
  const double up = extended_kernel_n(spec, 1, 1, NBoundaryPoint::real(1.0));
  const double down = extended_kernel_n(spec, 1, 1, NBoundaryPoint::real(-1.0));
  CHECK(std::fabs(up - down) > 0.5);
  for (int k = 30; k <= 33; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const auto j = static_cast<std::int64_t>(std::floor(std::pow(2.0, k + sign) + 0.5));
    CHECK(finite_kernel_n(spec, 1, 1, k, j) == doctest::Approx(sign > 0 ? up : down).epsilon(1e-6));
  }
}

TEST_CASE("harmonicity of the participant kernels") {
  for (double t : {0.3, 0.5}) {
    const BackwardChainSpec spec{Theta(t)};
    for (double z : {-1.0, 0.0, 1.0}) {
      for (int m = 1; m <= 10; m += 3) {
        for (int i = 1; i <= 10; i += 3) {
          const CertifiedSum r = harmonic_residual_n(spec, m, i, z);
          CHECK(std::fabs(r.value) < 1e-6);
          CHECK(r.tail_bound <= 1e-12);
        }
      }
    }
  }
  // the reference measure does not matter
  const BackwardChainSpec other(Theta(0.5), 0.9);
  CHECK(std::fabs(harmonic_residual_n(other, 2, 3, 0.5).value) < 1e-6);

  // with the unshifted f_i law in the numerator harmonicity fails
  const Theta half(0.5);
  const BackwardChainSpec spec(half);
  const auto h = [&](int m, int i) {
    return kernel_numerator(i, c_infinity(m, i, 0.0, half)) / geo0_pmf(marginal_param(spec, m), i);
  };
  double next = 0.0;
  for (int j = 2; j < 300; ++j) next += forward_transition_pmf(spec, 1, 2, j) * h(2, j);
  CHECK(std::fabs(h(1, 2) - next) > 1e-2);
}

TEST_CASE("normalisation of the boundary numerators") {
  // sum_i K(m,i;z) geo0(zeta_m, i) two ways
  const Theta half(0.5);
  const BackwardChainSpec spec(half);
  const int m = 2;
  const double z = 0.3;
  double quad = 0.0;
  for (int i = 1; i <= 60; ++i) {
    quad += extended_kernel_n(spec, m, i, NBoundaryPoint::real(z)) * geo0_pmf(marginal_param(spec, m), i);
  }
  Rng rng(31);
  const int runs = 20000;
  double mc = 0.0, var = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double c = c_infinity(m, i, z, half);
    const double shift = harmonic_number(i) - euler_gamma();
    int hit = 0;
    for (int r = 0; r < runs; ++r) {
      const double w = sample_w(i + 1, rng) + shift;
      hit += w < c && c < w + sample_exponential(rng, i);
    }
    const double p = hit / double(runs);
    mc += p;
    var += p * (1 - p) / runs;
  }
  CHECK(std::fabs(quad - mc) < 3.0 * std::sqrt(var) + 1e-9);
}

TEST_CASE("entrance durations") {
  const Theta half(0.5);
  const auto a = entrance_duration(0.0, half, 20);
  const auto b = entrance_duration(0.0, half, 30);
  CHECK(a.j_k == std::ldexp(1.0, 20));
  CHECK(a.achieved_z == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_NOTHROW(a.entrance_time.validate(1e-12));
  CHECK(total_variation(a.entrance_time, b.entrance_time) < 5e-3);

  const auto s = entrance_duration(0.3, half, 10);
  const auto t = entrance_duration(1.3, half, 9);
  CHECK(s.j_k == t.j_k);
  REQUIRE(s.entrance_time.support.size() == t.entrance_time.support.size());
  for (std::size_t r = 0; r < s.entrance_time.support.size(); ++r) {
    CHECK(t.entrance_time.support[r] == s.entrance_time.support[r] + 1);
    CHECK(t.entrance_time.mass[r] == s.entrance_time.mass[r]);
  }
  // entrance time is the duration minus k
  const CountDist direct = duration_dist(static_cast<std::int64_t>(s.j_k), half, 200);
  CHECK(s.entrance_time.at(3) == doctest::Approx(direct.at(13)).epsilon(1e-12));

  const Theta theta(0.9);
  const auto z0 = entrance_duration(0.0, theta, 25);
  const auto z5 = entrance_duration(0.5, theta, 25);
  const auto stab = total_variation(z0.entrance_time, entrance_duration(0.0, theta, 24).entrance_time);
  CHECK(total_variation(z0.entrance_time, z5.entrance_time) > 10.0 * stab);
  CHECK(total_variation(z0.entrance_time, z5.entrance_time) > 0.1);
  CHECK_NOTHROW(z0.entrance_time.validate(1e-12));

  CHECK_THROWS_AS(entrance_duration(0.0, theta, 0), ConfigError);
  CHECK_THROWS_AS(entrance_duration(0.0, theta, 40), ConfigError);
}

TEST_CASE("total variation") {
  const CountDist a{{1, 2}, {0.5, 0.5}, 0.0};
  const CountDist b{{2, 3}, {0.5, 0.5}, 0.0};
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == doctest::Approx(0.5));
  const CountDist c{{1}, {0.9}, 0.1};
  CHECK(total_variation(a, c) == doctest::Approx(0.5));
}

TEST_CASE("periodicity scans") {
  const Theta half(0.5);
  CHECK_THROWS_AS(periodicity_scan(half, {}), ConfigError);
  const auto pts = periodicity_scan(half, {1, 2, 1000});
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].p_unique == 1.0);
  CHECK(pts[1].p_unique == doctest::Approx(2.0 / 3.0));
  CHECK(pts[2].p_unique == prob_unique_winner(1000, half));

  const auto pow2 = subsequence_report(half, 1.0, 2.0, 8, 16);
  const auto pow2b = subsequence_report(half, 1.5, 2.0, 8, 16);
  REQUIRE(pow2.points.size() == 9);
  CHECK(pow2.points.front().n == 256);
  CHECK(pow2.points.back().n == 65536);
  CHECK(pow2b.points.front().n == 384);
  CHECK(pow2.last_increment < 5e-6);
  CHECK(pow2b.last_increment < 5e-6);
  CHECK(std::fabs(pow2.limit_estimate - pow2b.limit_estimate) >
        10.0 * std::max(pow2.last_increment, pow2b.last_increment));
  CHECK_THROWS_AS(subsequence_report(half, 1.0, 2.0, 9, 8), ConfigError);
  CHECK_THROWS_AS(subsequence_report(half, 1.0, 1.0, 1, 8), ConfigError);
}
