#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "geoleader/cli.hpp"
#include "geoleader/maxima_boundary.hpp"
#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_boundary.hpp"
#include "geoleader/participants_chain.hpp"

namespace py = pybind11;
using namespace geoleader;

namespace {

template <class State>
py::dict as_dict(const DiscreteDist<State>& d) {
  py::dict out;
  out["support"] = d.support;
  out["mass"] = d.mass;
  out["tail_bound"] = d.tail_bound;
  return out;
}

YBoundaryPoint y_point(std::optional<std::int64_t> J, double alpha) {
  return J ? YBoundaryPoint::finite(*J, alpha) : YBoundaryPoint::infinite(alpha);
}

MaxState state(const std::tuple<std::int64_t, std::int64_t, std::int64_t>& t) {
  return {std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

BackwardChainSpec reference(double theta, std::optional<double> zeta1) {
  return zeta1 ? BackwardChainSpec(Theta(theta), *zeta1) : BackwardChainSpec(Theta(theta));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "geometric leader election: exact laws, boundary kernels, samplers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_ArithmeticError);

  m.def("joint_dist_ml", [](std::int64_t n, double theta) { return as_dict(joint_dist_ml(n, Theta(theta))); },
        py::arg("n"), py::arg("theta"));
  m.def("rounds_dist", [](std::int64_t n, double theta) { return as_dict(rounds_dist(n, Theta(theta))); },
        py::arg("n"), py::arg("theta"));
  m.def("prob_unique_winner", [](std::int64_t n, double theta) { return prob_unique_winner(n, Theta(theta)); },
        py::arg("n"), py::arg("theta"));
  m.def(
      "simulate_election",
      [](std::int64_t k, double theta, std::uint64_t seed) {
        const auto e = simulate_election(k, Theta(theta), seed);
        return py::make_tuple(e.rounds, e.winners);
      },
      py::arg("k"), py::arg("theta"), py::arg("seed"));

  m.def(
      "finite_kernel_y",
      [](std::tuple<std::int64_t, std::int64_t, std::int64_t> x, std::tuple<std::int64_t, std::int64_t, std::int64_t> y,
         double theta) { return finite_kernel_y(state(x), state(y), Theta(theta)); },
      py::arg("x"), py::arg("y"), py::arg("theta"));
  m.def(
      "extended_kernel_y",
      [](std::tuple<std::int64_t, std::int64_t, std::int64_t> x, std::optional<std::int64_t> J, double alpha,
         double theta) { return extended_kernel_y(state(x), y_point(J, alpha), Theta(theta)); },
      py::arg("x"), py::arg("J"), py::arg("alpha"), py::arg("theta"),
      "J=None is the point at infinity");
  m.def(
      "h_transform_pmf",
      [](std::tuple<std::int64_t, std::int64_t, std::int64_t> x, std::tuple<std::int64_t, std::int64_t, std::int64_t> y,
         std::int64_t J, double alpha, double theta) {
        return h_transform_pmf(state(x), state(y), YBoundaryPoint::finite(J, alpha), Theta(theta));
      },
      py::arg("x"), py::arg("y"), py::arg("J"), py::arg("alpha"), py::arg("theta"));
  m.def(
      "simulate_conditioned_y",
      [](std::int64_t J, double alpha, double theta, std::int64_t steps, std::uint64_t seed) {
        std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> out;
        for (const auto& s : simulate_conditioned_y(YBoundaryPoint::finite(J, alpha), Theta(theta), steps, seed)) {
          out.emplace_back(s.m, s.i, s.k);
        }
        return out;
      },
      py::arg("J"), py::arg("alpha"), py::arg("theta"), py::arg("steps"), py::arg("seed"));

  m.def(
      "n_step_pmf",
      [](std::int64_t j, std::int64_t r, std::int64_t i, double theta) { return n_step_pmf(j, r, i, Theta(theta)); },
      py::arg("j"), py::arg("rounds"), py::arg("i"), py::arg("theta"));
  m.def(
      "duration_dist",
      [](std::int64_t j, double theta, std::int64_t horizon) {
        return as_dict(duration_dist(j, Theta(theta), horizon));
      },
      py::arg("j"), py::arg("theta"), py::arg("horizon"));

  m.def(
      "extended_kernel_n",
      [](std::int64_t m_, std::int64_t i, std::optional<double> z, double theta, std::optional<double> zeta1) {
        return extended_kernel_n(reference(theta, zeta1), m_, i, z ? NBoundaryPoint::real(*z) : NBoundaryPoint::diamond());
      },
      py::arg("m"), py::arg("i"), py::arg("z"), py::arg("theta"), py::arg("zeta1") = py::none(),
      "z=None is the point at infinity");
  m.def(
      "finite_kernel_n",
      [](std::int64_t m_, std::int64_t i, std::int64_t n, std::int64_t j, double theta, std::optional<double> zeta1) {
        return finite_kernel_n(reference(theta, zeta1), m_, i, n, j);
      },
      py::arg("m"), py::arg("i"), py::arg("n"), py::arg("j"), py::arg("theta"), py::arg("zeta1") = py::none());
  m.def("kernel_numerator", &kernel_numerator, py::arg("i"), py::arg("c"));
  m.def("cdf_f", &cdf_f, py::arg("i"), py::arg("x"));
  m.def(
      "sample_w", [](std::int64_t i, std::uint64_t seed) { return sample_w(i, seed); }, py::arg("i"),
      py::arg("seed"));
  m.def(
      "entrance_duration",
      [](double z, double theta, std::int64_t k) {
        const auto e = entrance_duration(z, Theta(theta), k);
        py::dict out = as_dict(e.entrance_time);
        out["j_k"] = e.j_k;
        out["achieved_z"] = e.achieved_z;
        return out;
      },
      py::arg("z"), py::arg("theta"), py::arg("k"));
  m.def(
      "periodicity_scan",
      [](double theta, const std::vector<std::int64_t>& ns) {
        std::vector<std::pair<std::int64_t, double>> out;
        for (const auto& p : periodicity_scan(Theta(theta), ns)) out.emplace_back(p.n, p.p_unique);
        return out;
      },
      py::arg("theta"), py::arg("n_list"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "geoleader");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "returns (exit_code, stdout, stderr)");
}
