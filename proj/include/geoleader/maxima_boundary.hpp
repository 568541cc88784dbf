#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "geoleader/maxima_chain.hpp"

namespace geoleader {

/// Boundary point (J, alpha) of the maxima chain: J is the limit of the running
/// maximum (nullopt for infinity), alpha the limit of multiplicity / time.
class YBoundaryPoint {
 public:
  static YBoundaryPoint finite(std::int64_t J, double alpha);
  static YBoundaryPoint infinite(double alpha);

  bool is_finite() const noexcept { return J_.has_value(); }
  /// Only meaningful when is_finite().
  std::int64_t J() const { return J_.value(); }
  double alpha() const noexcept { return alpha_; }

 private:
  YBoundaryPoint(std::optional<std::int64_t> J, double alpha);
  std::optional<std::int64_t> J_;
  double alpha_;
};

/// Martin kernel P(X_n = y | X_m = x) / P(X_n = y) for n > m, by closed form.
/// Throws ConfigError if n <= m or either state is unreachable.
double finite_kernel_y(const MaxState& x, const MaxState& y, const Theta& theta);

/// Extension of the Martin kernel to a boundary point.
double extended_kernel_y(const MaxState& x, const YBoundaryPoint& b, const Theta& theta);

/// h(x) - sum_y p(x,y) h(y) for the extended kernel of `b`. The successor sum is
/// finite for finite J; for J = infinity the geometric tail is summed in closed form.
double harmonic_residual(const YBoundaryPoint& b, const MaxState& x, const Theta& theta);

/// Residual for an arbitrary h. Successors (m+1, j, 1) with j beyond the
/// truncation point contribute at most h_bound * (1-theta)^{j-1}; the sum is cut
/// once that tail is below `tol`. Throws CertificationError if that needs more
/// than `max_terms` jump targets.
double harmonic_residual(const std::function<double(const MaxState&)>& h, double h_bound,
                         const MaxState& x, const Theta& theta, double tol = 1e-13,
                         std::int64_t max_terms = 1'000'000);

/// Transition probability of the chain conditioned on converging to the finite
/// boundary point b (the h-transform with h = extended_kernel_y(., b)).
/// Accepts from-states with i <= J; rejects J = infinity and J = 1 with alpha < 1.
double h_transform_pmf(const MaxState& from, const MaxState& to, const YBoundaryPoint& b,
                       const Theta& theta);

/// Constructive simulation of the conditioned chain: inside the strip i < J it
/// follows maxima of geometrics conditioned on {1..J-1} with probability 1-alpha
/// and jumps to (J, 1) with probability alpha; on {J} x N the multiplicity grows
/// with probability alpha per step. Returns X_1 .. X_steps, X_1 drawn from
/// the h-transformed initial law.
std::vector<MaxState> simulate_conditioned_y(const YBoundaryPoint& b, const Theta& theta,
                                             std::int64_t steps, std::uint64_t seed);

struct YSequenceSample {
  std::int64_t n;
  std::int64_t j;
  std::int64_t l;
};

struct YLimitVerdict {
  bool converged = false;
  std::optional<YBoundaryPoint> limit;
  std::string diagnostic;
};

/// Heuristic reading of a finite prefix: j_n counts as convergent if it is
/// constant over the last quarter, as tending to infinity if it is
/// nondecreasing there and exceeds everything seen in the first quarter; l_n/n
/// counts as convergent if its range over the last quarter is below 1e-2.
YLimitVerdict classify_limit_y(const std::vector<YSequenceSample>& states);

}  // namespace geoleader
