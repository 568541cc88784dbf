#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoleader/numerics.hpp"
#include "geoleader/random.hpp"

namespace geoleader {

/// Point of the one-point compactification of the real line: a real z or the
/// extra point (the "diamond"), which collects all sequences escaping to +-infinity.
class NBoundaryPoint {
 public:
  static NBoundaryPoint real(double z) { return NBoundaryPoint(z); }
  static NBoundaryPoint diamond() { return NBoundaryPoint(std::nullopt); }

  bool is_diamond() const noexcept { return !z_.has_value(); }
  double z() const { return z_.value(); }

 private:
  explicit NBoundaryPoint(std::optional<double> z) : z_(z) {}
  std::optional<double> z_;
};

/// Reference chain with backward binomial-thinning transitions and Geo0
/// marginals X_n ~ Geo0(zeta_n), zeta_{n+1} = psi_theta(zeta_n).
struct BackwardChainSpec {
  Theta theta;
  double zeta1;

  explicit BackwardChainSpec(Theta t) : BackwardChainSpec(t, t.value()) {}
  BackwardChainSpec(Theta t, double zeta1);
};

/// zeta_n, the Geo0 parameter of X_n.
double marginal_param(const BackwardChainSpec& spec, std::int64_t n);

/// P(X_n = j | X_{n+1} = i) = C(i,j) (1-theta)^j theta^{i-j}.
double backward_transition_pmf(std::int64_t i, std::int64_t j, const Theta& theta);

/// P(X_{n+1} = i | X_n = j), by Bayes against the Geo0 marginals.
double forward_transition_pmf(const BackwardChainSpec& spec, std::int64_t n, std::int64_t j,
                              std::int64_t i);

struct CertifiedSum {
  double value = 0.0;
  /// Upper bound on the neglected terms.
  double tail_bound = 0.0;
  std::int64_t terms = 0;
};

/// sum_{i >= j} forward_transition_pmf(spec, n, j, i) with a geometric tail bound.
CertifiedSum forward_row_sum(const BackwardChainSpec& spec, std::int64_t n, std::int64_t j,
                             double tol = 1e-15);

/// H_i - gamma - (m + z) / c(theta).
double c_infinity(std::int64_t m, std::int64_t i, double z, const Theta& theta);

/// P(W < c < W + gap) for W with density f_i and gap ~ Exp(i) independent:
/// the integral of f_i(w) exp(-i (c - w)) over w < c, by adaptive quadrature.
double kernel_numerator(std::int64_t i, double c);

/// Law of the L2-martingale limit W_i = lim_j sum_{l=i+1}^{j} (V_l - 1/l),
/// V_l ~ Exp(l): a shift by H_i - gamma of the law with density f_{i+1}.
double limit_density_w(std::int64_t i, double x);
double limit_cdf_w(std::int64_t i, double x);

/// P(W_i < c < W_i + gap) with W_i the martingale limit above and gap ~ Exp(i),
/// by adaptive quadrature. This is the numerator of the extended Martin kernel.
double boundary_numerator(std::int64_t i, double c);

/// Extended Martin kernel K(m, i; b); identically 0 at the diamond.
double extended_kernel_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                         const NBoundaryPoint& b);

/// P(X_m = i | X_n = j) / P(X_m = i) for n > m: Binomial(j, (1-theta)^{n-m}) at i
/// over Geo0(zeta_m) at i.
double finite_kernel_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                       std::int64_t n, std::int64_t j);

/// h(m,i) - sum_j p((m,i),(m+1,j)) h(m+1,j) for h = extended_kernel_n(.; z), the
/// j-sum cut once the certified tail falls below `tol`.
CertifiedSum harmonic_residual_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                                 double z, double tol = 1e-12);

/// -log G with G ~ Gamma(i, 1); has density f_i.
double sample_w(std::int64_t i, Rng& rng);
double sample_w(std::int64_t i, std::uint64_t seed);

/// sum_{l=i+1}^{j} (V_l - 1/l) with independent V_l ~ Exp(l).
double sample_martingale_partial_sum(std::int64_t i, std::int64_t j, Rng& rng);

/// Order statistics of n standard exponentials via V_n, V_n + V_{n-1}, ...,
/// with V_l ~ Exp(l).
std::vector<double> exp_order_stats(std::int64_t n, Rng& rng);
std::vector<double> exp_order_stats(std::int64_t n, std::uint64_t seed);

struct EntranceDuration {
  std::int64_t k = 0;
  /// round-half-up of (1-theta)^{-(k+z)}; exact integer below 2^53.
  double j_k = 0.0;
  /// c(theta) log j_k - k, the z actually realised after rounding.
  double achieved_z = 0.0;
  /// Law of the absolute time index at which the count first drops to <= 1,
  /// when the chain starts with j_k participants at time -k+1.
  CountDist entrance_time;
};

inline constexpr double kMaxEntrancePopulation = 1e30;

/// Throws ConfigError if j_k exceeds kMaxEntrancePopulation.
EntranceDuration entrance_duration(double z, const Theta& theta, std::int64_t k);

/// Total variation distance between two count laws (tails compared as one extra atom).
double total_variation(const CountDist& a, const CountDist& b);

struct PeriodicityPoint {
  std::int64_t n = 0;
  double p_unique = 0.0;
};

std::vector<PeriodicityPoint> periodicity_scan(const Theta& theta,
                                               const std::vector<std::int64_t>& n_list);

struct SubsequenceReport {
  double offset = 1.0;
  double ratio = 2.0;
  std::vector<std::int64_t> k;
  std::vector<PeriodicityPoint> points;
  /// Last value, taken as the subsequential limit estimate.
  double limit_estimate = 0.0;
  /// |p(n_K) - p(n_{K-1})| at the last level.
  double last_increment = 0.0;
};

/// P(L_n = 1) along n_k = round(offset * ratio^k) for k in [k_from, k_to].
SubsequenceReport subsequence_report(const Theta& theta, double offset, double ratio,
                                     std::int64_t k_from, std::int64_t k_to);

}  // namespace geoleader
