#include "geoleader/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include "geoleader/errors.hpp"
#include "geoleader/maxima_boundary.hpp"
#include "geoleader/maxima_chain.hpp"
#include "geoleader/participants_boundary.hpp"
#include "geoleader/participants_chain.hpp"
#include "geoleader/random.hpp"
#include "geoleader/selfcheck.hpp"

namespace geoleader {

namespace {

using json = nlohmann::ordered_json;
using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json meta = json::object();
  // extra "# ..." lines in CSV; JSON carries the same data under meta
  std::vector<std::string> notes;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return num(*d);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::get<std::string>(c);
}

std::string render(const RunConfig& cfg, const Table& t) {
  std::ostringstream os;
  if (cfg.format == OutputFormat::json) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = cfg.command;
    doc["theta"] = cfg.theta;
    doc["seed"] = cfg.seed;
    for (const auto& [key, value] : t.meta.items()) doc[key] = value;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (const auto& c : r) row.push_back(cell_json(c));
      rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(1) << '\n';
    return os.str();
  }
  os << "# schema_version=" << kSchemaVersion << " command=" << cfg.command
     << " theta=" << cfg.theta << " seed=" << cfg.seed;
  for (const auto& [key, value] : t.meta.items()) {
    if (value.is_primitive()) {
      os << ' ' << key << '=';
      if (value.is_number_float()) {
        os << num(value.get<double>());
      } else if (value.is_string()) {
        os << value.get<std::string>();
      } else {
        os << value.dump();
      }
    }
  }
  os << '\n';
  for (const auto& note : t.notes) os << "# " << note << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << cell_text(r[c]);
    os << '\n';
  }
  return os.str();
}

Theta parse_theta(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("theta is not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("theta is not a number: '" + text + "'");
  return Theta(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

std::int64_t to_int(const std::string& s, const char* what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(std::string("bad integer for ") + what + ": '" + s + "'");
  return v;
}

double to_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError(std::string("bad number for ") + what + ": '" + s + "'");
  return v;
}

std::vector<std::int64_t> int_list(const std::string& s, std::size_t count, const char* what) {
  const auto parts = split(s, ',');
  if (parts.size() != count) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(count) + " comma-separated integers");
  }
  std::vector<std::int64_t> out;
  for (const auto& p : parts) out.push_back(to_int(p, what));
  return out;
}

std::pair<std::int64_t, std::int64_t> k_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto k = to_int(s, "--k");
    return {k, k};
  }
  const auto lo = to_int(s.substr(0, dots), "--k");
  const auto hi = to_int(s.substr(dots + 2), "--k");
  if (hi < lo) throw ConfigError("--k range is empty");
  return {lo, hi};
}

YBoundaryPoint parse_y_boundary(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("--boundary expects J,alpha (J may be 'inf')");
  const double alpha = to_double(parts[1], "--boundary alpha");
  if (parts[0] == "inf") return YBoundaryPoint::infinite(alpha);
  return YBoundaryPoint::finite(to_int(parts[0], "--boundary J"), alpha);
}

MaxState parse_state(const std::string& s, const char* what) {
  const auto v = int_list(s, 3, what);
  MaxState x{v[0], v[1], v[2]};
  x.validate();
  return x;
}

void require_positive(std::int64_t v, const char* what) {
  if (v < 1) throw ConfigError(std::string(what) + " must be >= 1");
}

Table exact_ml(const RunConfig& cfg, const Theta& theta) {
  require_positive(cfg.n, "--n");
  Table t;
  t.meta["n"] = cfg.n;
  t.meta["p_unique"] = prob_unique_winner(cfg.n, theta);
  if (cfg.table == "ml") {
    const PairDist d = joint_dist_ml(cfg.n, theta);
    t.columns = {"j", "l", "mass"};
    t.meta["tail_bound"] = d.tail_bound;
    for (std::size_t s = 0; s < d.support.size(); ++s) {
      t.rows.push_back({d.support[s].first, d.support[s].second, d.mass[s]});
    }
  } else if (cfg.table == "rounds") {
    const CountDist d = rounds_dist(cfg.n, theta);
    t.columns = {"r", "mass"};
    t.meta["tail_bound"] = d.tail_bound;
    for (std::size_t s = 0; s < d.support.size(); ++s) t.rows.push_back({d.support[s], d.mass[s]});
  } else if (cfg.table == "rounds-winners") {
    const PairDist d = rounds_winners_dist(cfg.n, theta);
    t.columns = {"r", "l", "mass"};
    t.meta["tail_bound"] = d.tail_bound;
    for (std::size_t s = 0; s < d.support.size(); ++s) {
      t.rows.push_back({d.support[s].first, d.support[s].second, d.mass[s]});
    }
  } else {
    throw ConfigError("--table must be ml, rounds or rounds-winners");
  }
  return t;
}

Table simulate(const RunConfig& cfg, const Theta& theta) {
  require_positive(cfg.n, "--n");
  require_positive(cfg.runs, "--runs");
  Table t;
  t.meta["mode"] = cfg.mode;
  t.meta["n"] = cfg.n;
  t.meta["runs"] = cfg.runs;
  for (std::int64_t r = 0; r < cfg.runs; ++r) {
    const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
    if (cfg.mode == "election" || cfg.mode == "coupled") {
      t.columns = {"run", "rounds", "winners"};
      const ElectionOutcome e = cfg.mode == "election" ? simulate_election(cfg.n, theta, seed)
                                                      : simulate_coupled_election(cfg.n, theta, seed);
      t.rows.push_back({r, e.rounds, e.winners});
    } else if (cfg.mode == "y-path") {
      t.columns = {"run", "t", "j", "l"};
      const auto path = simulate_y_path(cfg.n, theta, seed);
      for (std::size_t s = 0; s < path.size(); ++s) {
        t.rows.push_back({r, static_cast<std::int64_t>(s + 1), path[s].first, path[s].second});
      }
    } else if (cfg.mode == "n-path") {
      t.columns = {"run", "t", "count"};
      const auto path = simulate_n_path(cfg.n, theta, seed);
      for (std::size_t s = 0; s < path.size(); ++s) {
        t.rows.push_back({r, static_cast<std::int64_t>(s + 1), path[s]});
      }
    } else {
      throw ConfigError("--mode must be election, coupled, y-path or n-path");
    }
  }
  return t;
}

Table kernel_y(const RunConfig& cfg, const Theta& theta) {
  Table t;
  t.columns = {"m", "i", "k", "value"};
  if (!cfg.target.empty() == !cfg.boundary.empty()) {
    throw ConfigError("kernel-y needs exactly one of --target n,j,l or --boundary J,alpha");
  }
  std::vector<MaxState> states;
  if (!cfg.state.empty()) {
    states.push_back(parse_state(cfg.state, "--state"));
  } else {
    require_positive(cfg.m_max, "--m-max");
    require_positive(cfg.i_max, "--i-max");
    for (std::int64_t m = 1; m <= cfg.m_max; ++m) {
      for (std::int64_t i = 1; i <= cfg.i_max; ++i) {
        for (std::int64_t k = 1; k <= m; ++k) {
          if (MaxState{m, i, k}.reachable()) states.push_back({m, i, k});
        }
      }
    }
  }
  if (!cfg.target.empty()) {
    const MaxState y = parse_state(cfg.target, "--target");
    t.meta["target"] = cfg.target;
    for (const auto& x : states) {
      if (x.m < y.m) t.rows.push_back({x.m, x.i, x.k, finite_kernel_y(x, y, theta)});
    }
  } else {
    const YBoundaryPoint b = parse_y_boundary(cfg.boundary);
    t.meta["boundary"] = cfg.boundary;
    for (const auto& x : states) t.rows.push_back({x.m, x.i, x.k, extended_kernel_y(x, b, theta)});
  }
  return t;
}

Table htransform_y(const RunConfig& cfg, const Theta& theta) {
  if (cfg.boundary.empty()) throw ConfigError("htransform-y needs --boundary J,alpha");
  const YBoundaryPoint b = parse_y_boundary(cfg.boundary);
  if (!b.is_finite()) throw ConfigError("htransform-y needs a finite J");
  Table t;
  t.meta["boundary"] = cfg.boundary;
  if (cfg.steps > 0) {
    t.columns = {"m", "i", "k"};
    for (const auto& x : simulate_conditioned_y(b, theta, cfg.steps, cfg.seed)) {
      t.rows.push_back({x.m, x.i, x.k});
    }
    return t;
  }
  require_positive(cfg.m_max, "--m-max");
  t.columns = {"m", "i", "k", "next_i", "next_k", "value"};
  for (std::int64_t m = 1; m <= cfg.m_max; ++m) {
    for (std::int64_t i = 1; i <= b.J(); ++i) {
      for (std::int64_t k = 1; k <= m; ++k) {
        const MaxState x{m, i, k};
        if (!x.reachable() || extended_kernel_y(x, b, theta) <= 0.0) continue;
        std::vector<MaxState> next = {{m + 1, i, k}, {m + 1, i, k + 1}};
        for (std::int64_t j = i + 1; j <= b.J(); ++j) next.push_back({m + 1, j, 1});
        for (const auto& y : next) {
          const double p = h_transform_pmf(x, y, b, theta);
          if (p > 0.0) t.rows.push_back({m, i, k, y.i, y.k, p});
        }
      }
    }
  }
  return t;
}

BackwardChainSpec chain_spec(const RunConfig& cfg, const Theta& theta) {
  return cfg.zeta1 ? BackwardChainSpec(theta, *cfg.zeta1) : BackwardChainSpec(theta);
}

Table kernel_n(const RunConfig& cfg, const Theta& theta) {
  const BackwardChainSpec spec = chain_spec(cfg, theta);
  const int modes = int(cfg.z.has_value()) + int(cfg.diamond) + int(!cfg.finite.empty());
  if (modes != 1) throw ConfigError("kernel-n needs exactly one of --z, --diamond, --finite n,j");
  require_positive(cfg.m_max, "--m-max");
  require_positive(cfg.i_max, "--i-max");
  Table t;
  t.columns = {"m", "i", "value"};
  t.meta["zeta1"] = spec.zeta1;
  std::vector<std::int64_t> target;
  if (!cfg.finite.empty()) {
    target = int_list(cfg.finite, 2, "--finite");
    t.meta["finite"] = cfg.finite;
  } else if (cfg.z) {
    t.meta["z"] = *cfg.z;
  } else {
    t.meta["boundary"] = "diamond";
  }
  for (std::int64_t m = 1; m <= cfg.m_max; ++m) {
    for (std::int64_t i = 1; i <= cfg.i_max; ++i) {
      double v = 0.0;
      if (!target.empty()) {
        if (m >= target[0]) continue;
        v = finite_kernel_n(spec, m, i, target[0], target[1]);
      } else {
        v = extended_kernel_n(spec, m, i, cfg.diamond ? NBoundaryPoint::diamond() : NBoundaryPoint::real(*cfg.z));
      }
      t.rows.push_back({m, i, v});
    }
  }
  return t;
}

Table entrance(const RunConfig& cfg, const Theta& theta) {
  if (!cfg.z) throw ConfigError("entrance needs --z");
  if (cfg.k_range.empty()) throw ConfigError("entrance needs --k a..b");
  const auto [lo, hi] = k_range(cfg.k_range);
  Table t;
  t.columns = {"k", "j_k", "t", "mass"};
  t.meta["z"] = *cfg.z;
  json levels = json::array();
  for (std::int64_t k = lo; k <= hi; ++k) {
    const EntranceDuration e = entrance_duration(*cfg.z, theta, k);
    const CountDist& d = e.entrance_time;
    levels.push_back({{"k", k}, {"j_k", e.j_k}, {"achieved_z", e.achieved_z}, {"tail_bound", d.tail_bound}});
    t.notes.push_back("k=" + std::to_string(k) + " j_k=" + num(e.j_k) + " achieved_z=" + num(e.achieved_z) +
                      " tail_bound=" + num(d.tail_bound));
    for (std::size_t s = 0; s < d.support.size(); ++s) t.rows.push_back({k, e.j_k, d.support[s], d.mass[s]});
  }
  t.meta["levels"] = std::move(levels);
  return t;
}

Table periodicity(const RunConfig& cfg, const Theta& theta) {
  Table t;
  t.columns = {"n", "p_unique", "series", "k"};
  if (!cfg.n_list.empty()) {
    std::vector<std::int64_t> ns;
    for (const auto& p : split(cfg.n_list, ',')) ns.push_back(to_int(p, "--n-list"));
    for (const auto& pt : periodicity_scan(theta, ns)) t.rows.push_back({pt.n, pt.p_unique, "list", std::string()});
    return t;
  }
  if (!cfg.n_geom) throw ConfigError("periodicity needs --n-list or --n-geom with --k a..b");
  if (cfg.k_range.empty()) throw ConfigError("--n-geom needs --k a..b");
  const auto [lo, hi] = k_range(cfg.k_range);
  json series = json::array();
  for (const auto& off : split(cfg.offsets, ',')) {
    const double offset = to_double(off, "--offsets");
    const SubsequenceReport rep = subsequence_report(theta, offset, *cfg.n_geom, lo, hi);
    const std::string name = "offset=" + off;
    series.push_back({{"series", name},
                      {"limit_estimate", rep.limit_estimate},
                      {"last_increment", rep.last_increment}});
    t.notes.push_back(name + " limit_estimate=" + num(rep.limit_estimate) +
                      " last_increment=" + num(rep.last_increment));
    for (std::size_t s = 0; s < rep.points.size(); ++s) {
      t.rows.push_back({rep.points[s].n, rep.points[s].p_unique, name, rep.k[s]});
    }
  }
  t.meta["ratio"] = *cfg.n_geom;
  t.meta["series"] = std::move(series);
  return t;
}

int selftest(const RunConfig& cfg, std::ostream& out) {
  const auto results = run_selftest();
  bool ok = true;
  Table t;
  t.columns = {"criterion", "name", "status", "seconds", "detail"};
  for (const auto& r : results) {
    ok = ok && r.passed;
    t.rows.push_back({static_cast<std::int64_t>(r.id), r.name, std::string(r.passed ? "PASS" : "FAIL"), r.seconds,
                      r.detail});
  }
  if (cfg.format == OutputFormat::json) {
    out << render(cfg, t);
  } else {
    for (const auto& r : results) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3fs", r.seconds);
      out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << ", " << buf
          << "): " << r.detail << '\n';
    }
  }
  return ok ? 0 : 1;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + cfg.output);
  f << text;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Theta theta = parse_theta(cfg.theta);
    if (cfg.command == "selftest") return selftest(cfg, out);
    Table t;
    if (cfg.command == "exact-ml") {
      t = exact_ml(cfg, theta);
    } else if (cfg.command == "simulate") {
      t = simulate(cfg, theta);
    } else if (cfg.command == "kernel-y") {
      t = kernel_y(cfg, theta);
    } else if (cfg.command == "htransform-y") {
      t = htransform_y(cfg, theta);
    } else if (cfg.command == "kernel-n") {
      t = kernel_n(cfg, theta);
    } else if (cfg.command == "entrance") {
      t = entrance(cfg, theta);
    } else if (cfg.command == "periodicity") {
      t = periodicity(cfg, theta);
    } else {
      throw ConfigError("unknown command '" + cfg.command + "'");
    }
    emit(cfg, render(cfg, t), out);
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CertificationError& e) {
    err << "certification failure: " << e.what() << '\n';
    return 3;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"geometric leader election: exact laws, boundary kernels, periodicity"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--theta", cfg.theta, "coin parameter in (0,1), decimal string")->capture_default_str();
    sub->add_option("--seed", seed, "64-bit seed (fallback: GEOLEADER_SEED, then 0)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output,-o", cfg.output, "output file (default stdout)");
  };

  auto* ml = app.add_subcommand("exact-ml", "exact law of (M_n, L_n), rounds and P(unique winner)");
  common(ml);
  ml->add_option("--n", cfg.n, "number of participants")->required();
  ml->add_option("--table", cfg.table, "ml, rounds or rounds-winners")->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "elections and chain paths");
  common(sim);
  sim->add_option("--mode", cfg.mode, "election, coupled, y-path or n-path")->capture_default_str();
  sim->add_option("--n", cfg.n, "participants, path length or starting count")->capture_default_str();
  sim->add_option("--runs", cfg.runs, "independent replicates")->capture_default_str();

  auto* ky = app.add_subcommand("kernel-y", "Martin kernel of the maxima chain");
  common(ky);
  ky->add_option("--state", cfg.state, "single state m,i,k (default: grid)");
  ky->add_option("--target", cfg.target, "finite kernel towards n,j,l");
  ky->add_option("--boundary", cfg.boundary, "extended kernel at J,alpha (J may be inf)");
  ky->add_option("--m-max", cfg.m_max, "grid bound on m")->capture_default_str();
  ky->add_option("--i-max", cfg.i_max, "grid bound on i")->capture_default_str();

  auto* hy = app.add_subcommand("htransform-y", "transition table or simulation of the conditioned chain");
  common(hy);
  hy->add_option("--boundary", cfg.boundary, "finite boundary point J,alpha")->required();
  hy->add_option("--m-max", cfg.m_max, "table bound on m")->capture_default_str();
  hy->add_option("--steps", cfg.steps, "simulate this many steps instead of the table");

  auto* kn = app.add_subcommand("kernel-n", "Martin kernel of the participant chain");
  common(kn);
  kn->add_option("--z", cfg.z, "real boundary point");
  kn->add_flag("--diamond", cfg.diamond, "the point at infinity");
  kn->add_option("--finite", cfg.finite, "finite kernel towards n,j");
  kn->add_option("--zeta1", cfg.zeta1, "Geo0 parameter of the reference chain at time 1 (default theta)");
  kn->add_option("--m-max", cfg.m_max, "grid bound on m")->capture_default_str();
  kn->add_option("--i-max", cfg.i_max, "grid bound on i")->capture_default_str();

  auto* en = app.add_subcommand("entrance", "duration law under the entrance approximations");
  common(en);
  en->add_option("--z", cfg.z, "boundary parameter")->required();
  en->add_option("--k", cfg.k_range, "approximation levels a..b")->required();

  auto* pe = app.add_subcommand("periodicity", "P(L_n = 1) scans and subsequence limits");
  common(pe);
  pe->add_option("--n-list", cfg.n_list, "explicit comma-separated n values");
  pe->add_option("--n-geom", cfg.n_geom, "ratio of the geometric subsequences");
  pe->add_option("--k", cfg.k_range, "exponent range a..b");
  pe->add_option("--offsets", cfg.offsets, "subsequence offsets")->capture_default_str();

  auto* st = app.add_subcommand("selftest", "fast invariant suites");
  common(st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
      out << sub->help();
      return 0;
    }
  }
  cfg.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (seed) {
    cfg.seed = *seed;
  } else if (const char* env = std::getenv("GEOLEADER_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: GEOLEADER_SEED is not an unsigned integer\n";
      return 2;
    }
  }
  return run(cfg, out, err);
}

}  // namespace geoleader
