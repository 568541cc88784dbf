#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geoleader {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { csv, json };

struct RunConfig {
  std::string command;
  std::string theta = "0.5";
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::csv;
  /// Empty means standard output.
  std::string output;

  // exact-ml / simulate
  std::int64_t n = 10;
  std::string table = "ml";
  std::string mode = "election";
  std::int64_t runs = 1;

  // kernel-y / htransform-y
  std::string state;
  std::string target;
  std::string boundary;
  std::int64_t m_max = 5;
  std::int64_t i_max = 5;
  std::int64_t steps = 0;

  // kernel-n / entrance
  std::optional<double> z;
  bool diamond = false;
  std::optional<double> zeta1;
  std::string finite;

  // entrance / periodicity
  std::string k_range;
  std::string n_list;
  std::optional<double> n_geom;
  std::string offsets = "1,1.5";
};

/// Exit codes: 0 success, 1 failed selftest, 2 bad configuration,
/// 3 numerical certification failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and dispatches to run().
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoleader
