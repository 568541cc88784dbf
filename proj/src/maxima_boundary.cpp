#include "geoleader/maxima_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geoleader/random.hpp"

namespace geoleader {

namespace {

double q_pow(const Theta& theta, std::int64_t e) {
  return std::exp(static_cast<double>(e) * theta.log_q());
}

double one_minus_q_pow(const Theta& theta, std::int64_t e) {
  return -std::expm1(static_cast<double>(e) * theta.log_q());
}

void require_reachable(const MaxState& s, const char* what) {
  s.validate();
  if (!s.reachable()) {
    throw ConfigError(std::string(what) + " state is unreachable (maximum 1 forces k = m)");
  }
}

void require_conditionable(const YBoundaryPoint& b) {
  if (!b.is_finite()) throw ConfigError("the h-transform is defined for finite J only");
  if (b.J() == 1 && b.alpha() < 1.0) {
    throw ConfigError("J = 1 is a boundary point only for alpha = 1");
  }
}

}  // namespace

YBoundaryPoint::YBoundaryPoint(std::optional<std::int64_t> J, double alpha) : J_(J), alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
  if (J && *J < 1) throw ConfigError("J must be >= 1");
}

YBoundaryPoint YBoundaryPoint::finite(std::int64_t J, double alpha) { return {J, alpha}; }

YBoundaryPoint YBoundaryPoint::infinite(double alpha) { return {std::nullopt, alpha}; }

double finite_kernel_y(const MaxState& x, const MaxState& y, const Theta& theta) {
  require_reachable(x, "source");
  require_reachable(y, "target");
  if (y.m <= x.m) throw ConfigError("finite_kernel_y requires n > m");
  const auto [m, i, k] = x;
  const auto [n, j, l] = y;
  if (j < i) return 0.0;
  if (j == i) {
    if (l < k || l - k > n - m) return 0.0;
    double log_k = -static_cast<double>(k) *
                   (std::log(theta.value()) + static_cast<double>(i - 1) * theta.log_q());
    if (k != m) log_k += static_cast<double>(k - m) * std::log(one_minus_q_pow(theta, i - 1));
    return binom_ratio(n, m, l, k) * std::exp(log_k);
  }
  if (l > n - m) return 0.0;
  return binom_ratio(n, m, l, 0) *
         std::exp(-static_cast<double>(m) * std::log(one_minus_q_pow(theta, j - 1)));
}

double extended_kernel_y(const MaxState& x, const YBoundaryPoint& b, const Theta& theta) {
  x.validate();
  const double alpha = b.alpha();
  const auto m = static_cast<double>(x.m);
  if (!b.is_finite()) return std::pow(1.0 - alpha, m);
  const std::int64_t J = b.J();
  if (x.i > J) return 0.0;
  const double below = one_minus_q_pow(theta, J - 1);
  if (x.i < J) return std::pow(1.0 - alpha, m) * std::pow(below, -m);
  const auto k = static_cast<double>(x.k);
  const double at_J = theta.value() * q_pow(theta, J - 1);
  return std::pow(alpha, k) * std::pow(1.0 - alpha, m - k) * std::pow(at_J, -k) *
         std::pow(below, k - m);
}

double harmonic_residual(const YBoundaryPoint& b, const MaxState& x, const Theta& theta) {
  x.validate();
  const double hx = extended_kernel_y(x, b, theta);
  const double p_stay = one_minus_q_pow(theta, x.i - 1);
  const double p_inc = theta.value() * q_pow(theta, x.i - 1);
  double next = 0.0;
  if (p_stay > 0.0) next += p_stay * extended_kernel_y({x.m + 1, x.i, x.k}, b, theta);
  next += p_inc * extended_kernel_y({x.m + 1, x.i, x.k + 1}, b, theta);
  if (b.is_finite()) {
    for (std::int64_t j = x.i + 1; j <= b.J(); ++j) {
      next += theta.value() * q_pow(theta, j - 1) * extended_kernel_y({x.m + 1, j, 1}, b, theta);
    }
  } else {
    // Every jump target carries the same value (1-alpha)^{m+1}; jumps have total mass q^i.
    next += q_pow(theta, x.i) * std::pow(1.0 - b.alpha(), static_cast<double>(x.m + 1));
  }
  return hx - next;
}

double harmonic_residual(const std::function<double(const MaxState&)>& h, double h_bound,
                         const MaxState& x, const Theta& theta, double tol, std::int64_t max_terms) {
  x.validate();
  if (!(h_bound >= 0.0) || !(tol > 0.0)) throw ConfigError("h_bound must be >= 0 and tol > 0");
  const double p_stay = one_minus_q_pow(theta, x.i - 1);
  const double p_inc = theta.value() * q_pow(theta, x.i - 1);
  double next = 0.0;
  if (p_stay > 0.0) next += p_stay * h({x.m + 1, x.i, x.k});
  next += p_inc * h({x.m + 1, x.i, x.k + 1});
  // Jumps beyond `last` have total probability q^last.
  std::int64_t last = x.i;
  while (h_bound * q_pow(theta, last) > tol) {
    ++last;
    if (last - x.i > max_terms) {
      throw CertificationError("harmonic_residual: tail bound not certified within max_terms");
    }
    next += theta.value() * q_pow(theta, last - 1) * h({x.m + 1, last, 1});
  }
  return h(x) - next;
}

double h_transform_pmf(const MaxState& from, const MaxState& to, const YBoundaryPoint& b,
                       const Theta& theta) {
  require_conditionable(b);
  from.validate();
  const std::int64_t J = b.J();
  const double alpha = b.alpha();
  if (from.i > J) throw ConfigError("from-state lies outside E(h): maximum exceeds J");
  if (to.m != from.m + 1) return 0.0;
  const auto [m, i, k] = from;
  const std::int64_t j = to.i;
  const std::int64_t l = to.k;
  const double strip = one_minus_q_pow(theta, J - 1);
  if (j == i && l == k) {
    if (i == J) return J == 1 ? 0.0 : 1.0 - alpha;
    return (1.0 - alpha) * one_minus_q_pow(theta, i - 1) / strip;
  }
  if (j == i && l == k + 1) {
    if (i == J) return alpha;
    return (1.0 - alpha) * theta.value() * q_pow(theta, i - 1) / strip;
  }
  if (j > i && l == 1) {
    if (j < J) return (1.0 - alpha) * theta.value() * q_pow(theta, j - 1) / strip;
    if (j == J) return alpha;
  }
  return 0.0;
}

std::vector<MaxState> simulate_conditioned_y(const YBoundaryPoint& b, const Theta& theta,
                                             std::int64_t steps, std::uint64_t seed) {
  require_conditionable(b);
  if (steps < 1) throw ConfigError("steps must be >= 1");
  const std::int64_t J = b.J();
  const double alpha = b.alpha();
  Rng rng(seed);
  std::vector<MaxState> path;
  path.reserve(static_cast<std::size_t>(steps));
  if (uniform_open(rng) < alpha) {
    path.push_back({1, J, 1});
  } else {
    path.push_back({1, sample_truncated_geometric(rng, theta, J - 1), 1});
  }
  while (static_cast<std::int64_t>(path.size()) < steps) {
    const MaxState cur = path.back();
    MaxState next{cur.m + 1, cur.i, cur.k};
    if (cur.i < J) {
      if (uniform_open(rng) < alpha) {
        next.i = J;
        next.k = 1;
      } else {
        const std::int64_t xi = sample_truncated_geometric(rng, theta, J - 1);
        if (xi == cur.i) {
          next.k = cur.k + 1;
        } else if (xi > cur.i) {
          next.i = xi;
          next.k = 1;
        }
      }
    } else if (uniform_open(rng) < alpha) {
      next.k = cur.k + 1;
    }
    path.push_back(next);
  }
  return path;
}

YLimitVerdict classify_limit_y(const std::vector<YSequenceSample>& states) {
  YLimitVerdict out;
  const std::size_t size = states.size();
  if (size < 4) {
    out.diagnostic = "prefix too short to judge (need at least 4 terms)";
    return out;
  }
  const std::size_t tail_start = size - size / 4;
  const std::size_t head_end = size / 4;
  std::int64_t tail_min = states[tail_start].j;
  std::int64_t tail_max = tail_min;
  bool nondecreasing = true;
  for (std::size_t s = tail_start; s < size; ++s) {
    tail_min = std::min(tail_min, states[s].j);
    tail_max = std::max(tail_max, states[s].j);
    if (s > tail_start && states[s].j < states[s - 1].j) nondecreasing = false;
  }
  std::int64_t head_max = states.front().j;
  for (std::size_t s = 0; s < head_end; ++s) head_max = std::max(head_max, states[s].j);

  std::optional<std::int64_t> J;
  bool j_to_infinity = false;
  std::ostringstream diag;
  if (tail_min == tail_max) {
    J = tail_min;
    diag << "j_n constant (" << tail_min << ") over the last quarter";
  } else if (nondecreasing && tail_min > head_max) {
    j_to_infinity = true;
    diag << "j_n nondecreasing and growing: treated as tending to infinity";
  } else {
    diag << "j_n oscillates over the last quarter (range " << tail_min << ".." << tail_max
         << "): divergent";
    out.diagnostic = diag.str();
    return out;
  }

  double r_min = 1.0;
  double r_max = 0.0;
  for (std::size_t s = tail_start; s < size; ++s) {
    const double r = static_cast<double>(states[s].l) / static_cast<double>(states[s].n);
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  const double alpha = std::clamp(
      static_cast<double>(states.back().l) / static_cast<double>(states.back().n), 0.0, 1.0);
  if (r_max - r_min >= 1e-2) {
    diag << "; l_n/n ranges over [" << r_min << ", " << r_max << "] in the last quarter: divergent";
    out.diagnostic = diag.str();
    return out;
  }
  diag << "; l_n/n settles near " << alpha;
  out.converged = true;
  out.limit = j_to_infinity ? YBoundaryPoint::infinite(alpha) : YBoundaryPoint::finite(*J, alpha);
  out.diagnostic = diag.str();
  return out;
}

}  // namespace geoleader
