#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "geoleader/errors.hpp"

namespace geoleader {

/// Probability of heads; every model object carries one. Always in (0,1).
class Theta {
 public:
  explicit Theta(double value);

  double value() const noexcept { return value_; }
  /// Survival probability 1 - theta.
  double q() const noexcept { return 1.0 - value_; }
  /// log(1 - theta), computed without cancellation.
  double log_q() const noexcept { return log_q_; }

 private:
  double value_;
  double log_q_;
};

using PairState = std::pair<std::int64_t, std::int64_t>;

/// Finite probability table. Mass outside `support` is recorded in
/// `tail_bound` rather than dropped.
template <class State>
struct DiscreteDist {
  std::vector<State> support;
  std::vector<double> mass;
  double tail_bound = 0.0;

  double total() const;
  double at(const State& s) const;
  /// Throws ConfigError unless masses are nonnegative, support is strictly
  /// increasing and total() + tail_bound is within `tol` of 1.
  void validate(double tol = 1e-12) const;
};

extern template struct DiscreteDist<std::int64_t>;
extern template struct DiscreteDist<PairState>;

using CountDist = DiscreteDist<std::int64_t>;
using PairDist = DiscreteDist<PairState>;

/// -1 / log(1 - theta); c(theta) log y is the base-1/(1-theta) logarithm of y.
double c_theta(const Theta& theta);

double harmonic_number(std::int64_t n);

double euler_gamma();

/// f_l(x) = exp(-l x - e^{-x}) / (l-1)!, the law of -log G with G ~ Gamma(l, 1).
double density_f(std::int64_t l, double x);
double log_density_f(std::int64_t l, double x);

/// P(W <= x) for W with density f_l. Equals the regularized upper incomplete
/// gamma Q(l, e^{-x}), summed as a Poisson tail.
double cdf_f(std::int64_t l, double x);

/// Number-of-failures geometric law: (1-eta)^i eta.
double geo0_pmf(double eta, std::int64_t i);
double log_geo0_pmf(double eta, std::int64_t i);

/// psi_theta(zeta) = zeta (1-theta) / (1 - zeta theta).
double psi_theta(const Theta& theta, double zeta);

/// Binomial thinning: C(i,j) theta^{i-j} (1-theta)^j.
double thinning_pmf(std::int64_t i, std::int64_t j, const Theta& theta);

/// Binomial(n, p) pmf at x via Loader's saddle-point expansion; accurate to a
/// few ulps in relative terms for n up to ~1e15.
double binomial_pmf(std::int64_t x, std::int64_t n, double p);
double log_binomial_pmf(std::int64_t x, std::int64_t n, double p);
/// Same, with q = 1 - p passed separately so that p near 1 keeps full precision.
double log_binomial_pmf_pq(std::int64_t x, std::int64_t n, double p, double q);

/// log C(n, k).
double log_binom(std::int64_t n, std::int64_t k);

/// C(n-m, l-k) / C(n, l). Returns 0 when the numerator coefficient vanishes.
double binom_ratio(std::int64_t n, std::int64_t m, std::int64_t l, std::int64_t k);

}  // namespace geoleader
