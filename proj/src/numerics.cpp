#include "geoleader/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace geoleader {

namespace {

constexpr double kLn2Pi = 1.837877066409345483560659472811;

// Error of Stirling's approximation to log(n!).
double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    if (n == 0.0) return 0.0;
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * kLn2Pi;
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, evaluated without cancellation.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log Binomial(n, p) pmf at x with q = 1 - p supplied separately.
double log_dbinom_pq(double x, double n, double p, double q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (x < 0 || x > n) return kNegInf;
  if (p == 0.0) return x == 0 ? 0.0 : kNegInf;
  if (q == 0.0) return x == n ? 0.0 : kNegInf;
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -bd0(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) {
    return q < 0.1 ? -bd0(n, n * p) - n * q : n * std::log(p);
  }
  const double lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
  const double lf = kLn2Pi + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

// log(a! / (a-d)!) for 0 <= d <= a.
double log_falling(std::int64_t a, std::int64_t d) {
  if (d <= 64) {
    double s = 0.0;
    for (std::int64_t r = 0; r < d; ++r) s += std::log(static_cast<double>(a - r));
    return s;
  }
  return std::lgamma(static_cast<double>(a) + 1.0) - std::lgamma(static_cast<double>(a - d) + 1.0);
}

}  // namespace

Theta::Theta(double value) : value_(value), log_q_(std::log1p(-value)) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream os;
    os << "theta must lie in the open interval (0,1), got " << value;
    throw ConfigError(os.str());
  }
}

template <class State>
double DiscreteDist<State>::total() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

template <class State>
double DiscreteDist<State>::at(const State& s) const {
  auto it = std::lower_bound(support.begin(), support.end(), s);
  if (it == support.end() || *it != s) return 0.0;
  return mass[static_cast<std::size_t>(it - support.begin())];
}

template <class State>
void DiscreteDist<State>::validate(double tol) const {
  if (support.size() != mass.size()) throw ConfigError("support and mass differ in length");
  if (!(tail_bound >= 0.0)) throw ConfigError("negative tail bound");
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (!(mass[i] >= 0.0)) throw ConfigError("negative mass in distribution");
    if (i > 0 && !(support[i - 1] < support[i])) throw ConfigError("support not strictly increasing");
  }
  const double s = total() + tail_bound;
  if (std::fabs(s - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "distribution mass plus tail is " << s;
    throw ConfigError(os.str());
  }
}

template struct DiscreteDist<std::int64_t>;
template struct DiscreteDist<PairState>;

double c_theta(const Theta& theta) { return -1.0 / theta.log_q(); }

double harmonic_number(std::int64_t n) {
  if (n < 1) throw ConfigError("harmonic_number requires n >= 1");
  double s = 0.0;
  for (std::int64_t k = n; k >= 1; --k) s += 1.0 / static_cast<double>(k);
  return s;
}

double euler_gamma() { return std::numbers::egamma; }

double log_density_f(std::int64_t l, double x) {
  if (l < 1) throw ConfigError("density_f requires l >= 1");
  return -static_cast<double>(l) * x - std::exp(-x) - std::lgamma(static_cast<double>(l));
}

double density_f(std::int64_t l, double x) { return std::exp(log_density_f(l, x)); }

double cdf_f(std::int64_t l, double x) {
  if (l < 1) throw ConfigError("cdf_f requires l >= 1");
  if (x == std::numeric_limits<double>::infinity()) return 1.0;
  const double y = std::exp(-x);
  if (!std::isfinite(y)) return 0.0;
  if (y == 0.0) return 1.0;
  const auto lf = static_cast<double>(l);
  const double log_y = std::log(y);
  if (y < lf) {
    // upper Poisson tail is the small side: 1 - sum_{k>=l} e^{-y} y^k / k!
    double term = std::exp(-y + lf * log_y - std::lgamma(lf + 1.0));
    double tail = 0.0;
    for (std::int64_t k = l; term > 1e-18 * tail && k < l + 100000; ++k) {
      tail += term;
      term *= y / static_cast<double>(k + 1);
    }
    return 1.0 - tail;
  }
  // Q(l, y) = sum_{k<l} e^{-y} y^k / k!
  double s = 0.0;
  for (std::int64_t k = 0; k < l; ++k) {
    s += std::exp(-y + static_cast<double>(k) * log_y - std::lgamma(static_cast<double>(k) + 1.0));
  }
  return std::min(s, 1.0);
}

double log_geo0_pmf(double eta, std::int64_t i) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("geo0_pmf requires eta in (0,1)");
  if (i < 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(i) * std::log1p(-eta) + std::log(eta);
}

double geo0_pmf(double eta, std::int64_t i) { return std::exp(log_geo0_pmf(eta, i)); }

double psi_theta(const Theta& theta, double zeta) {
  if (!(zeta >= 0.0 && zeta <= 1.0)) throw ConfigError("psi_theta requires zeta in [0,1]");
  return zeta * theta.q() / (1.0 - zeta * theta.value());
}

double log_binomial_pmf(std::int64_t x, std::int64_t n, double p) {
  if (n < 0) throw ConfigError("binomial size must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binomial probability must lie in [0,1]");
  return log_dbinom_pq(static_cast<double>(x), static_cast<double>(n), p, 1.0 - p);
}

double log_binomial_pmf_pq(std::int64_t x, std::int64_t n, double p, double q) {
  if (n < 0) throw ConfigError("binomial size must be nonnegative");
  return log_dbinom_pq(static_cast<double>(x), static_cast<double>(n), p, q);
}

double binomial_pmf(std::int64_t x, std::int64_t n, double p) {
  return std::exp(log_binomial_pmf(x, n, p));
}

double thinning_pmf(std::int64_t i, std::int64_t j, const Theta& theta) {
  if (i < 0 || j < 0 || j > i) return 0.0;
  if (i == 0) return 1.0;
  return std::exp(log_dbinom_pq(static_cast<double>(j), static_cast<double>(i), theta.q(), theta.value()));
}

double log_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_dbinom_pq(static_cast<double>(k), static_cast<double>(n), 0.5, 0.5) +
         static_cast<double>(n) * std::numbers::ln2;
}

double binom_ratio(std::int64_t n, std::int64_t m, std::int64_t l, std::int64_t k) {
  if (n < 0 || m < 0 || k < 0 || l < 0 || m > n || l > n) {
    throw ConfigError("binom_ratio requires 0 <= m <= n and 0 <= l <= n");
  }
  if (l - k < 0 || l - k > n - m) return 0.0;
  // C(n-m, l-k)/C(n,l) = [l!/(l-k)!] [(n-l)!/(n-l-(m-k))!] / [n!/(n-m)!]
  double s = log_falling(l, k) - log_falling(n, m);
  const std::int64_t d = m - k;
  if (d >= 0) {
    s += log_falling(n - l, d);
  } else {
    s -= log_falling(n - l - d, -d);
  }
  return std::exp(s);
}

}  // namespace geoleader
