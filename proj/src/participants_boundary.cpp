#include "geoleader/participants_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_chain.hpp"
#include "geoleader/quadrature.hpp"

namespace geoleader {

namespace {

constexpr double kQuadTarget = 1e-12;
constexpr double kQuadRequired = 1e-10;

// Gap probability integral over (-inf, c] with the left window cut where the
// density is double-exponentially small. The integrand can be a narrow spike
// at c, so the window is split with breakpoints packed towards c.
double gap_integral(const std::function<double(double)>& log_integrand, std::int64_t i, double c) {
  const double lo = c - 60.0 / static_cast<double>(i) - 40.0;
  const auto f = [&](double w) { return std::exp(log_integrand(w)); };
  const double cuts[] = {lo, c - 30.0, c - 8.0, c - 2.0, c - 0.5, c - 0.1, c};
  double total = 0.0;
  for (int s = 0; s + 1 < 7; ++s) {
    const double a = std::max(lo, cuts[s]), b = cuts[s + 1];
    if (!(b > a)) continue;
    try {
      total += integrate(f, a, b, kQuadTarget / 6.0, 4000).value;
    } catch (const CertificationError&) {
      total += integrate(f, a, b, kQuadRequired / 6.0, 20000).value;
    }
  }
  return total;
}

// Shift H_i - gamma between f_{i+1} and the martingale-limit law.
double limit_shift(std::int64_t i) { return harmonic_number(i) - euler_gamma(); }

double log_forward(const Theta& theta, double zeta_n, double zeta_next, std::int64_t j,
                   std::int64_t i) {
  // back(i, j) geo0(zeta_next, i) / geo0(zeta_n, j)
  return log_binomial_pmf_pq(j, i, theta.q(), theta.value()) + log_geo0_pmf(zeta_next, i) -
         log_geo0_pmf(zeta_n, j);
}

void check_positive(std::int64_t v, const char* msg) {
  if (v < 1) throw ConfigError(msg);
}

}  // namespace

BackwardChainSpec::BackwardChainSpec(Theta t, double z1) : theta(t), zeta1(z1) {
  if (!(z1 > 0.0 && z1 < 1.0)) throw ConfigError("zeta1 must lie in (0,1)");
}

double marginal_param(const BackwardChainSpec& spec, std::int64_t n) {
  check_positive(n, "marginal_param requires n >= 1");
  double zeta = spec.zeta1;
  for (std::int64_t s = 1; s < n; ++s) zeta = psi_theta(spec.theta, zeta);
  return zeta;
}

double backward_transition_pmf(std::int64_t i, std::int64_t j, const Theta& theta) {
  if (i < 0 || j < 0 || j > i) return 0.0;
  return std::exp(log_binomial_pmf_pq(j, i, theta.q(), theta.value()));
}

double forward_transition_pmf(const BackwardChainSpec& spec, std::int64_t n, std::int64_t j,
                              std::int64_t i) {
  check_positive(n, "forward_transition_pmf requires n >= 1");
  if (j < 0 || i < j) return 0.0;
  const double zeta_n = marginal_param(spec, n);
  return std::exp(log_forward(spec.theta, zeta_n, psi_theta(spec.theta, zeta_n), j, i));
}

CertifiedSum forward_row_sum(const BackwardChainSpec& spec, std::int64_t n, std::int64_t j,
                             double tol) {
  check_positive(n, "forward_row_sum requires n >= 1");
  if (j < 0) throw ConfigError("forward_row_sum requires j >= 0");
  const Theta& theta = spec.theta;
  const double zeta_n = marginal_param(spec, n);
  const double zeta_next = psi_theta(theta, zeta_n);
  CertifiedSum out;
  for (std::int64_t i = j;; ++i) {
    const double term = std::exp(log_forward(theta, zeta_n, zeta_next, j, i));
    out.value += term;
    ++out.terms;
    // Consecutive-term ratio, decreasing in i.
    const double rho = static_cast<double>(i + 1) / static_cast<double>(i + 1 - j) *
                       theta.value() * (1.0 - zeta_next);
    if (rho < 1.0) {
      out.tail_bound = term * rho / (1.0 - rho);
      if (out.tail_bound <= tol) return out;
    }
    if (out.terms > 10'000'000) throw CertificationError("forward_row_sum: tail not certified");
  }
}

double c_infinity(std::int64_t m, std::int64_t i, double z, const Theta& theta) {
  check_positive(m, "c_infinity requires m >= 1");
  check_positive(i, "c_infinity requires i >= 1");
  return harmonic_number(i) - euler_gamma() - (static_cast<double>(m) + z) / c_theta(theta);
}

double kernel_numerator(std::int64_t i, double c) {
  check_positive(i, "kernel_numerator requires i >= 1");
  const auto gap_rate = static_cast<double>(i);
  return gap_integral([&](double w) { return log_density_f(i, w) - gap_rate * (c - w); }, i, c);
}

double limit_density_w(std::int64_t i, double x) {
  check_positive(i, "limit_density_w requires i >= 1");
  return density_f(i + 1, x - limit_shift(i));
}

double limit_cdf_w(std::int64_t i, double x) {
  check_positive(i, "limit_cdf_w requires i >= 1");
  return cdf_f(i + 1, x - limit_shift(i));
}

double boundary_numerator(std::int64_t i, double c) {
  check_positive(i, "boundary_numerator requires i >= 1");
  const double shift = limit_shift(i);
  const auto gap_rate = static_cast<double>(i);
  return gap_integral(
      [&](double w) { return log_density_f(i + 1, w - shift) - gap_rate * (c - w); }, i, c);
}

double extended_kernel_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                         const NBoundaryPoint& b) {
  check_positive(m, "extended_kernel_n requires m >= 1");
  check_positive(i, "extended_kernel_n requires i >= 1");
  if (b.is_diamond()) return 0.0;
  const double numerator = boundary_numerator(i, c_infinity(m, i, b.z(), spec.theta));
  return numerator / geo0_pmf(marginal_param(spec, m), i);
}

double finite_kernel_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                       std::int64_t n, std::int64_t j) {
  check_positive(m, "finite_kernel_n requires m >= 1");
  if (n <= m) throw ConfigError("finite_kernel_n requires n > m");
  if (i < 0 || j < 0) throw ConfigError("finite_kernel_n requires i, j >= 0");
  if (i > j) return 0.0;
  const double log_p = static_cast<double>(n - m) * spec.theta.log_q();
  const double log_kappa = log_binomial_pmf_pq(i, j, std::exp(log_p), -std::expm1(log_p));
  return std::exp(log_kappa - log_geo0_pmf(marginal_param(spec, m), i));
}

CertifiedSum harmonic_residual_n(const BackwardChainSpec& spec, std::int64_t m, std::int64_t i,
                                 double z, double tol) {
  check_positive(m, "harmonic_residual_n requires m >= 1");
  check_positive(i, "harmonic_residual_n requires i >= 1");
  const Theta& theta = spec.theta;
  const NBoundaryPoint b = NBoundaryPoint::real(z);
  const double zeta_m = marginal_param(spec, m);
  const double zeta_next = psi_theta(theta, zeta_m);
  const double log_geo_m = log_geo0_pmf(zeta_m, i);
  const auto h_next = [&](std::int64_t j) {
    return boundary_numerator(j, c_infinity(m + 1, j, z, theta)) / geo0_pmf(zeta_next, j);
  };
  double next = 0.0;
  CertifiedSum out;
  for (std::int64_t j = i;; ++j) {
    next += std::exp(log_forward(theta, zeta_m, zeta_next, i, j)) * h_next(j);
    ++out.terms;
    // p * h = back(j, i) * numerator / geo0(zeta_m, i), numerator <= 1, and
    // back(j+1, i) / back(j, i) = theta (j+1) / (j+1-i) decreases in j.
    const double rho = theta.value() * static_cast<double>(j + 1) / static_cast<double>(j + 1 - i);
    if (rho < 1.0) {
      const double log_back = log_binomial_pmf_pq(i, j, theta.q(), theta.value());
      out.tail_bound = std::exp(log_back - log_geo_m) * rho / (1.0 - rho);
      if (out.tail_bound <= tol) break;
    }
    if (out.terms > 100'000) throw CertificationError("harmonic_residual_n: tail not certified");
  }
  out.value = extended_kernel_n(spec, m, i, b) - next;
  return out;
}

double sample_w(std::int64_t i, Rng& rng) {
  check_positive(i, "sample_w requires i >= 1");
  std::gamma_distribution<double> gamma(static_cast<double>(i), 1.0);
  return -std::log(gamma(rng));
}

double sample_w(std::int64_t i, std::uint64_t seed) {
  Rng rng(seed);
  return sample_w(i, rng);
}

double sample_martingale_partial_sum(std::int64_t i, std::int64_t j, Rng& rng) {
  check_positive(i, "sample_martingale_partial_sum requires i >= 1");
  double s = 0.0;
  for (std::int64_t l = j; l > i; --l) {
    const auto rate = static_cast<double>(l);
    s += sample_exponential(rng, rate) - 1.0 / rate;
  }
  return s;
}

std::vector<double> exp_order_stats(std::int64_t n, Rng& rng) {
  check_positive(n, "exp_order_stats requires n >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (std::int64_t l = n; l >= 1; --l) {
    acc += sample_exponential(rng, static_cast<double>(l));
    out.push_back(acc);
  }
  return out;
}

std::vector<double> exp_order_stats(std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return exp_order_stats(n, rng);
}

EntranceDuration entrance_duration(double z, const Theta& theta, std::int64_t k) {
  check_positive(k, "entrance_duration requires k >= 1");
  const double raw = std::exp(-(static_cast<double>(k) + z) * theta.log_q());
  if (!(raw <= kMaxEntrancePopulation)) {
    throw ConfigError("entrance_duration: j_k exceeds the supported population range (1e30)");
  }
  const double j = std::floor(raw + 0.5);
  if (j < 1.0) throw ConfigError("entrance_duration: j_k rounds to 0");
  EntranceDuration out;
  out.k = k;
  out.j_k = j;
  out.achieved_z = c_theta(theta) * std::log(j) - static_cast<double>(k);
  const auto horizon =
      static_cast<std::int64_t>(std::ceil((std::log(j) + 40.0) / -theta.log_q())) + 2;
  out.entrance_time = j <= 0x1.0p53 ? duration_dist(static_cast<std::int64_t>(j), theta, horizon)
                                    : duration_dist_closed(j, theta, horizon);
  for (auto& t : out.entrance_time.support) t -= k;
  return out;
}

double total_variation(const CountDist& a, const CountDist& b) {
  std::map<std::int64_t, double> diff;
  for (std::size_t s = 0; s < a.support.size(); ++s) diff[a.support[s]] += a.mass[s];
  for (std::size_t s = 0; s < b.support.size(); ++s) diff[b.support[s]] -= b.mass[s];
  double tv = std::fabs(a.tail_bound - b.tail_bound);
  for (const auto& [state, d] : diff) tv += std::fabs(d);
  return 0.5 * tv;
}

std::vector<PeriodicityPoint> periodicity_scan(const Theta& theta,
                                               const std::vector<std::int64_t>& n_list) {
  if (n_list.empty()) throw ConfigError("periodicity_scan needs at least one n");
  std::vector<PeriodicityPoint> out;
  out.reserve(n_list.size());
  for (std::int64_t n : n_list) out.push_back({n, prob_unique_winner(n, theta)});
  return out;
}

SubsequenceReport subsequence_report(const Theta& theta, double offset, double ratio,
                                     std::int64_t k_from, std::int64_t k_to) {
  if (k_to < k_from) throw ConfigError("subsequence_report: empty k range");
  if (!(offset > 0.0 && ratio > 1.0)) throw ConfigError("subsequence_report: need offset > 0, ratio > 1");
  SubsequenceReport out;
  out.offset = offset;
  out.ratio = ratio;
  std::vector<std::int64_t> ns;
  for (std::int64_t k = k_from; k <= k_to; ++k) {
    const double n = std::floor(offset * std::pow(ratio, static_cast<double>(k)) + 0.5);
    if (n < 1.0 || n > 9e15) throw ConfigError("subsequence_report: n_k out of range");
    out.k.push_back(k);
    ns.push_back(static_cast<std::int64_t>(n));
  }
  out.points = periodicity_scan(theta, ns);
  out.limit_estimate = out.points.back().p_unique;
  if (out.points.size() >= 2) {
    out.last_increment = std::fabs(out.points.back().p_unique - out.points[out.points.size() - 2].p_unique);
  }
  return out;
}

}  // namespace geoleader
