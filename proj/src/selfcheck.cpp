#include "geoleader/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>

#include "geoleader/maxima_boundary.hpp"
#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_boundary.hpp"
#include "geoleader/participants_chain.hpp"

namespace geoleader {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

const double kThetas[] = {0.2, 0.5, 0.8};

// Row of the (M, L) chain from (i, k); jumps summed until their remaining mass
// q^j drops below 1e-17.
double y_row_sum(std::int64_t i, std::int64_t k, const Theta& theta) {
  double s = y_transition_pmf({i, k}, {i, k}, theta) + y_transition_pmf({i, k}, {i, k + 1}, theta);
  for (std::int64_t j = i + 1; std::pow(theta.q(), static_cast<double>(j - 1)) > 1e-17; ++j) {
    s += y_transition_pmf({i, k}, {j, 1}, theta);
  }
  return s;
}

}  // namespace

CriterionResult timed(int id, const std::string& name,
                      const std::function<bool(std::string&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.passed = body(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

CriterionResult check_row_sums() {
  return timed(1, "row sums", [](std::string& detail) {
    double worst = 0.0;
    const auto note = [&](double s) { worst = std::max(worst, std::fabs(s - 1.0)); };
    for (double t : kThetas) {
      const Theta theta(t);
      for (std::int64_t i = 1; i <= 30; ++i) {
        for (std::int64_t k = 1; k <= 30; ++k) note(y_row_sum(i, k, theta));
      }
      for (std::int64_t i = 0; i <= 30; ++i) {
        double thin = 0.0, back = 0.0;
        for (std::int64_t j = 0; j <= i; ++j) {
          thin += n_transition_pmf(i, j, theta);
          back += backward_transition_pmf(i, j, theta);
        }
        note(thin);
        note(back);
      }
      const BackwardChainSpec spec(theta);
      for (std::int64_t n = 1; n <= 30; ++n) {
        for (std::int64_t j = 0; j <= 30; ++j) {
          const CertifiedSum row = forward_row_sum(spec, n, j, 1e-14);
          note(row.value);
        }
      }
      for (std::int64_t J : {2, 3, 5}) {
        for (double alpha : {0.0, 0.3, 1.0}) {
          const auto b = YBoundaryPoint::finite(J, alpha);
          for (std::int64_t m = 1; m <= 30; ++m) {
            for (std::int64_t i = 1; i <= J; ++i) {
              for (std::int64_t k = 1; k <= m; ++k) {
                const MaxState x{m, i, k};
                if (!x.reachable() || extended_kernel_y(x, b, theta) <= 0.0) continue;
                double s = h_transform_pmf(x, {m + 1, i, k}, b, theta) +
                           h_transform_pmf(x, {m + 1, i, k + 1}, b, theta);
                for (std::int64_t j = i + 1; j <= J; ++j) {
                  s += h_transform_pmf(x, {m + 1, j, 1}, b, theta);
                }
                note(s);
              }
            }
          }
        }
      }
    }
    detail = fmt("max |row - 1| = %.3e", worst);
    return worst <= 1e-10;
  });
}

CriterionResult check_y_harmonicity() {
  return timed(2, "Y-kernel harmonicity", [](std::string& detail) {
    const Theta theta(0.5);
    double worst_finite = 0.0, worst_defect = 0.0;
    std::int64_t states = 0;
    for (std::int64_t m = 1; m <= 20; ++m) {
      for (std::int64_t k = 1; k <= m; ++k) {
        for (std::int64_t J : {2, 3, 5}) {
          for (double alpha : {0.0, 0.3, 1.0}) {
            const auto b = YBoundaryPoint::finite(J, alpha);
            for (std::int64_t i = 1; i <= J; ++i) {
              const MaxState x{m, i, k};
              if (!x.reachable() || extended_kernel_y(x, b, theta) <= 0.0) continue;
              const double h = extended_kernel_y(x, b, theta);
              // h reaches ~1e13 on the line i = J, so compare on the scale of h
              worst_finite = std::max(worst_finite,
                                      std::fabs(harmonic_residual(b, x, theta)) / std::max(1.0, h));
              ++states;
            }
          }
        }
        for (double alpha : {0.3, 0.7}) {
          const auto b = YBoundaryPoint::infinite(alpha);
          for (std::int64_t i = 1; i <= 12; ++i) {
            const MaxState x{m, i, k};
            if (!x.reachable()) continue;
            const double h = extended_kernel_y(x, b, theta);
            const double defect = harmonic_residual(b, x, theta) - alpha * h;
            worst_defect = std::max(worst_defect, std::fabs(defect) / std::max(1.0, h));
          }
        }
      }
    }
    detail = fmt("finite J: max |residual|/max(1,h) = %.3e", worst_finite) +
             fmt(" over %.0f states; J=inf: max |defect - alpha h| = %.3e",
                 static_cast<double>(states), worst_defect);
    return worst_finite <= 1e-10 && worst_defect <= 1e-10;
  });
}

CriterionResult check_y_kernel_convergence() {
  return timed(3, "Y-kernel convergence", [](std::string& detail) {
    const Theta theta(0.5);
    const auto b = YBoundaryPoint::finite(3, 0.4);
    const std::int64_t ns[] = {100, 1000, 10000, 100000};
    bool decreasing = true;
    double final_rel = 0.0, final_abs = 0.0;
    for (std::int64_t m = 1; m <= 5; ++m) {
      for (std::int64_t i = 1; i <= 3; ++i) {
        for (std::int64_t k = 1; k <= m; ++k) {
          const MaxState x{m, i, k};
          if (!x.reachable()) continue;
          const double limit = extended_kernel_y(x, b, theta);
          double prev = INFINITY, abs_err = 0.0;
          for (std::int64_t n : ns) {
            const MaxState y{n, 3, std::llround(0.4 * static_cast<double>(n))};
            abs_err = std::fabs(finite_kernel_y(x, y, theta) - limit);
            const double rel = abs_err / limit;
            // m = 1 kernels are exact for every n; ignore rounding noise there
            if (rel > prev && rel > 1e-12) decreasing = false;
            prev = rel;
          }
          final_rel = std::max(final_rel, prev);
          final_abs = std::max(final_abs, abs_err);
        }
      }
    }
    detail = fmt("n=1e5: max relative error %.3e (absolute %.3e)", final_rel, final_abs) +
             "; errors decreasing: " + (decreasing ? "yes" : "no");
    const double final_error = final_rel;
    return decreasing && final_error < 1e-2;
  });
}

CriterionResult check_n_matrix_power() {
  return timed(6, "thinning matrix power", [](std::string& detail) {
    constexpr int kSize = 31;
    double worst = 0.0;
    for (double t : {0.3, 0.5, 0.7}) {
      const Theta theta(t);
      std::vector<double> one(kSize * kSize, 0.0), power(kSize * kSize, 0.0), next(kSize * kSize);
      for (int i = 0; i < kSize; ++i) {
        power[i * kSize + i] = 1.0;
        for (int j = 0; j <= i; ++j) one[i * kSize + j] = n_transition_pmf(i, j, theta);
      }
      for (int r = 1; r <= 10; ++r) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < kSize; ++i) {
          for (int l = 0; l <= i; ++l) {
            for (int j = 0; j <= l; ++j) next[i * kSize + j] += power[i * kSize + l] * one[l * kSize + j];
          }
        }
        power.swap(next);
        for (int i = 0; i < kSize; ++i) {
          for (int j = 0; j <= i; ++j) {
            worst = std::max(worst, std::fabs(power[i * kSize + j] - n_step_pmf(i, r, j, theta)));
          }
        }
      }
    }
    detail = fmt("max |P^r - Binomial| = %.3e", worst);
    return worst <= 1e-12;
  });
}

CriterionResult check_n_kernel_limit() {
  return timed(8, "N-kernel boundary limit", [](std::string& detail) {
    const Theta theta(0.5);
    const BackwardChainSpec spec(theta);
    const double limit = extended_kernel_n(spec, 1, 1, NBoundaryPoint::real(0.0));
    const auto j = static_cast<std::int64_t>(std::ldexp(1.0, 40));
    const double finite = finite_kernel_n(spec, 1, 1, 40, j);
    const double err = std::fabs(finite - limit);
    detail = fmt("finite %.10f vs extended %.10f", finite, limit) + fmt(", error %.3e", err);
    return err < 1e-3;
  });
}

std::vector<CriterionResult> run_selftest() {
  return {check_row_sums(), check_y_harmonicity(), check_y_kernel_convergence(),
          check_n_matrix_power(), check_n_kernel_limit()};
}

}  // namespace geoleader
