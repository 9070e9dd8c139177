// genalg: batch driver for regularized solves, ε-sweeps, Dirac experiments,
// net classification and the property suite.
//
// Exit codes: 0 success, 1 a checked property failed, 2 bad configuration.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "genalg/data_ingestion.hpp"
#include "genalg/dirichlet_solver.hpp"
#include "genalg/error.hpp"
#include "genalg/expression.hpp"
#include "genalg/serialization.hpp"
#include "genalg/verification.hpp"

namespace fs = std::filesystem;
using namespace genalg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProperty = 1;
constexpr int kExitConfig = 2;

struct ConfigError : Error {
  using Error::Error;
};

struct Flags {
  std::string config;
  std::string out;
  std::optional<int> workers;
  std::optional<unsigned long long> seed;
  bool quiet = false;
};

struct Config {
  Json raw;
  Domain domain;
  EpsilonGrid grid = EpsilonGrid::geometric();
  PhiSpec phi = phi_library::saturated_cubic();
  std::string f = "0";
  std::string g = "0";
  int tests = 3;
  SolveOptions solve;
  double assoc_tol = 1e-3;
  int k_max = kDefaultKMax;
  double class_tol = kDefaultClassTol;
  fs::path out = "genalg_out";
  int workers = 1;
  unsigned long long seed = 20240611;
};

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Domain parse_domain(const Json& j) {
  const int dim = get_or(j, "dim", 1);
  const int n = get_or(j, "n", 64);
  const auto x = get_or(j, "x", std::vector<double>{0.0, 1.0});
  if (x.size() != 2) throw ConfigError("domain.x must be [a, b]");
  if (dim == 1) return Domain::interval(x[0], x[1], n);
  if (dim != 2) throw ConfigError("domain.dim must be 1 or 2");
  const auto y = get_or(j, "y", std::vector<double>{0.0, 1.0});
  if (y.size() != 2) throw ConfigError("domain.y must be [a, b]");
  return Domain::rectangle(x[0], x[1], y[0], y[1], n);
}

EpsilonGrid parse_grid(const Json& j) {
  if (j.contains("values")) return EpsilonGrid(j.at("values").get<std::vector<double>>());
  const int count = get_or(j, "count", 25);
  if (count < 2) throw ConfigError("epsilon_grid.count must be at least 2");
  return EpsilonGrid::geometric(get_or(j, "eps0", 0.5), get_or(j, "ratio", 0.5), count - 1);
}

Config load_config(const Flags& flags) {
  Config c;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot open config " + flags.config);
    try {
      c.raw = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (get_or(c.raw, "version", 0) != 1) throw ConfigError("config version must be 1");
  } else {
    c.raw = Json::object();
  }
  const Json& j = c.raw;
  c.domain = parse_domain(get_or(j, "domain", Json::object()));
  c.grid = parse_grid(get_or(j, "epsilon_grid", Json::object()));
  if (j.contains("phi")) {
    const auto& p = j.at("phi");
    c.phi = phi_library::by_name(p.at("name").get<std::string>(), get_or(p, "parameter", 1.0));
  }
  c.f = get_or(j, "f", c.f);
  c.g = get_or(j, "g", c.g);
  c.tests = get_or(j, "tests", c.tests);
  if (c.tests < 1) throw ConfigError("tests must be positive");

  const Json tol = get_or(j, "tolerances", Json::object());
  c.solve.picard_tol = get_or(tol, "picard", c.solve.picard_tol);
  c.solve.linear_tol = get_or(tol, "linear", c.solve.linear_tol);
  c.solve.max_principle_tol = get_or(tol, "max_principle", c.solve.max_principle_tol);
  c.solve.max_picard_iter = get_or(tol, "max_picard_iter", c.solve.max_picard_iter);
  c.assoc_tol = get_or(tol, "association", c.assoc_tol);
  c.class_tol = get_or(tol, "classification", c.class_tol);
  c.k_max = get_or(j, "k_max", c.k_max);
  for (double t : {c.solve.picard_tol, c.solve.linear_tol, c.solve.max_principle_tol, c.assoc_tol,
                   c.class_tol}) {
    if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
  }

  c.out = flags.out.empty() ? fs::path(get_or<std::string>(j, "output", "genalg_out")) : fs::path(flags.out);
  if (flags.workers) {
    c.workers = *flags.workers;
  } else if (j.contains("workers")) {
    c.workers = j.at("workers").get<int>();
  } else if (const char* env = std::getenv("GENALG_WORKERS")) {
    c.workers = std::atoi(env);
  }
  if (c.workers < 1) throw ConfigError("workers must be positive");
  c.seed = flags.seed ? *flags.seed : get_or(j, "seed", c.seed);
  return c;
}

/// r_ε from "viscosity": {"expression": ...} or {"dirac": {"d", "q"}}.
ViscosityScale viscosity_from(const Config& c, const Mollifier& moll = Mollifier()) {
  const Json v = get_or(c.raw, "viscosity", Json{{"expression", "eps"}});
  if (v.contains("dirac")) {
    const auto& dq = v.at("dirac");
    return viscosity_for_dirac(dq.at("d").get<int>(), dq.at("q").get<int>(), c.grid, moll, c.assoc_tol).scale;
  }
  return validate_viscosity(build_viscosity_net(v.at("expression").get<std::string>(), c.grid), c.k_max,
                            c.class_tol);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void prepare_out(const Config& c) { fs::create_directories(c.out); }

int cmd_solve(const Config& c, bool quiet) {
  double r = 0.0;
  double epsilon = 0.0;
  if (c.raw.contains("r")) {
    r = c.raw.at("r").get<double>();
  } else {
    epsilon = get_or(c.raw, "epsilon", c.grid[0]);
    const auto expr = get_or(get_or(c.raw, "viscosity", Json::object()), "expression", std::string("eps"));
    r = Expression::parse(expr, {"eps"})(0.0, 0.0, epsilon);
  }
  if (!(r > 0.0)) throw ConfigError("viscosity r must be positive");
  const auto f = build_data(c.f, c.domain);
  const auto g = build_boundary(c.g, c.domain);
  auto sol = solve_regularized(f, g, c.phi, r, c.solve);
  sol.report.epsilon = epsilon;

  prepare_out(c);
  write_grid_csv(c.out / "solution.csv", sol.u);
  write_json(c.out / "report.json", to_json(sol.report));
  if (!quiet) {
    std::printf("r=%.3e  m=%.6g  M=%.6g  picard=%d  margin=%.3e  ||u||_inf=%.6g\n", r, sol.report.m,
                sol.report.M, sol.report.picard_iters, sol.report.max_principle_margin, sol.report.u_linf);
  }
  return kExitOk;
}

struct SweepData {
  GeneralizedGridFunction F;
  std::vector<BoundaryData> G;
};

SweepData sweep_data(const Config& c) {
  return {constant_net(build_data(c.f, c.domain), c.grid),
          std::vector<BoundaryData>(c.grid.size(), build_boundary(c.g, c.domain))};
}

GeneralizedSolveOptions generalized_options(const Config& c) {
  GeneralizedSolveOptions o;
  o.solve = c.solve;
  o.workers = c.workers;
  o.k_max = c.k_max;
  o.class_tol = c.class_tol;
  return o;
}

int cmd_sweep(const Config& c, bool quiet) {
  const auto r = viscosity_from(c);
  const auto data = sweep_data(c);
  const auto sol = generalized_solve(data.F, data.G, c.phi, r, generalized_options(c));

  prepare_out(c);
  write_reports_csv(c.out / "reports.csv", sol.reports);
  write_net_csv(c.out / "e_norm_net.csv", sol.e_norm_net);
  double max_ratio = 0.0;
  for (const auto& rep : sol.reports) max_ratio = std::max(max_ratio, rep.estimate_ratio);
  Json summary;
  summary["e_norm_class"] = to_json(sol.e_norm_class);
  summary["trace_exact"] = sol.trace_exact;
  summary["max_estimate_ratio"] = max_ratio;
  write_json(c.out / "sweep.json", summary);
  if (!quiet) {
    std::printf("%-12s %-12s %6s %12s %12s\n", "epsilon", "r", "iters", "||u||_E", "ratio");
    for (std::size_t j = 0; j < sol.reports.size(); ++j) {
      const auto& rep = sol.reports[j];
      std::printf("%-12.4e %-12.4e %6d %12.5e %12.5e\n", rep.epsilon, rep.r_eps, rep.picard_iters,
                  sol.e_norm_net[j], rep.estimate_ratio);
    }
    std::printf("solution norm net: %s\n", summary["e_norm_class"].dump().c_str());
  }
  return sol.trace_exact ? kExitOk : kExitProperty;
}

int cmd_dirac(const Config& c, bool quiet) {
  const Json dj = get_or(c.raw, "dirac", Json::object());
  auto x0v = get_or(dj, "x0", std::vector<double>{0.5, 0.5});
  if (x0v.empty() || x0v.size() > 2) throw ConfigError("dirac.x0 must have 1 or 2 coordinates");
  x0v.resize(2, 0.0);
  if (c.domain.dim() == 1) x0v[1] = 0.0;
  const std::array<double, 2> x0{x0v[0], x0v[1]};
  const Mollifier moll(mollifier_profile_from_string(get_or<std::string>(dj, "profile", "bump")));
  const double weight = get_or(dj, "weight", 1.0);

  const Json vj = get_or(c.raw, "viscosity", Json::object());
  const Json dq = get_or(vj, "dirac", Json{{"d", c.domain.dim()}, {"q", 2}});
  const auto visc = viscosity_for_dirac(dq.at("d").get<int>(), dq.at("q").get<int>(), c.grid, moll, c.assoc_tol);

  auto F = dirac_net(x0, moll, c.domain, c.grid);
  for (auto& m : F.members) m.values *= weight;
  const std::vector<BoundaryData> G(c.grid.size(), build_boundary(c.g, c.domain));
  const auto tests = builtin_test_functions(c.domain, c.tests);

  prepare_out(c);
  write_net_csv(c.out / "hyp_net.csv", visc.hyp_evidence);
  const auto assoc = assoc_weak(F, PointMass{x0, weight}, tests, AssocMode::Hminus2, c.assoc_tol);

  Json summary;
  summary["hyp_holds"] = visc.hyp_holds;
  summary["hyp_slope"] = visc.hyp_slope;
  summary["dirac_association"] = to_json(assoc);
  if (!visc.hyp_holds) {
    write_json(c.out / "dirac.json", summary);
    if (!quiet) std::printf("hypothesis net does not tend to 0 (slope %.3f)\n", visc.hyp_slope);
    return kExitProperty;
  }

  const auto sol = generalized_solve(F, G, c.phi, visc.scale, generalized_options(c));
  const auto weak = weak_solution_check(sol, F, G, c.phi, visc.scale, tests, c.assoc_tol);
  write_reports_csv(c.out / "reports.csv", sol.reports);
  {
    std::ofstream out(c.out / "weak_residuals.csv");
    out << "test_id,epsilon,resolved,residual,bound\n";
    for (const auto& e : weak.entries) {
      for (std::size_t j = 0; j < c.grid.size(); ++j) {
        out << e.test_id << ',' << format_real(c.grid[j]) << ',' << (F.resolved[j] ? 1 : 0) << ','
            << format_real(e.residual[j]) << ',' << format_real(e.bound[j]) << '\n';
      }
    }
  }
  summary["weak_solution"] = to_json(weak, c.grid);
  write_json(c.out / "dirac.json", summary);
  if (!quiet) {
    std::printf("hyp slope %.3f, association %s\n", visc.hyp_slope, assoc.associated ? "ok" : "FAILED");
    std::printf("%-10s %10s %8s %8s\n", "test", "slope", "bound", "->0");
    for (const auto& e : weak.entries) {
      std::printf("%-10s %10.4f %8s %8s\n", e.test_id.c_str(), e.slope, e.bound_ok ? "ok" : "FAIL",
                  e.tends_to_zero ? "ok" : "FAIL");
    }
  }
  return weak.passed && assoc.associated ? kExitOk : kExitProperty;
}

int cmd_verify(const Config& c, const std::vector<int>& ids, bool quiet, bool write_table) {
  verify::SuiteOptions o;
  o.seed = c.seed;
  o.workers = c.workers;
  const auto results = verify::run(o, ids);
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    if (!quiet) std::printf("%s\n", verify::format_line(r).c_str());
  }
  if (write_table) {
    prepare_out(c);
    std::ofstream out(c.out / "verify.csv");
    out << "id,name,passed,seconds,detail\n";
    for (const auto& r : results) {
      std::string detail = r.detail;
      for (auto& ch : detail) {
        if (ch == '"') ch = '\'';
      }
      out << r.id << ',' << r.name << ',' << (r.passed ? 1 : 0) << ',' << format_real(r.seconds) << ",\""
          << detail << "\"\n";
    }
  }
  return ok ? kExitOk : kExitProperty;
}

int cmd_classify(const std::string& path, int k_max, double tol) {
  if (!fs::exists(path)) throw ConfigError("no such net file: " + path);
  const auto net = read_net_csv(path);
  std::printf("%s\n", to_json(classify_net(net, k_max, tol)).dump(2).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized solutions of degenerate elliptic Dirichlet problems"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON experiment config");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--workers", flags.workers, "worker threads (default: GENALG_WORKERS or 1)");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_flag("--quiet", flags.quiet, "suppress progress output");
  };

  auto* solve = app.add_subcommand("solve", "single-viscosity regularized solve");
  auto* sweep = app.add_subcommand("sweep", "generalized solve over the epsilon grid");
  auto* dirac = app.add_subcommand("dirac", "Dirac-data experiment with the weak-solution check");
  auto* verify_cmd = app.add_subcommand("verify", "run the property suite");
  auto* classify = app.add_subcommand("classify", "classify a net stored as epsilon,value CSV");
  for (auto* s : {solve, sweep, dirac, verify_cmd}) add_common(s);

  std::vector<int> criteria;
  verify_cmd->add_option("--criteria", criteria, "criterion numbers (default: all)");
  std::string net_path;
  int k_max = kDefaultKMax;
  double class_tol = kDefaultClassTol;
  classify->add_option("path", net_path, "net CSV")->required();
  classify->add_option("--k-max", k_max, "largest certified order");
  classify->add_option("--tol", class_tol, "exponent tolerance");
  classify->add_flag("--quiet", flags.quiet, "accepted for symmetry; the JSON is always printed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (classify->parsed()) return cmd_classify(net_path, k_max, class_tol);
    const Config c = load_config(flags);
    if (solve->parsed()) return cmd_solve(c, flags.quiet);
    if (sweep->parsed()) return cmd_sweep(c, flags.quiet);
    if (dirac->parsed()) return cmd_dirac(c, flags.quiet);
    return cmd_verify(c, criteria, flags.quiet, !flags.out.empty() || c.raw.contains("output"));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NotInVAPlus& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return kExitProperty;
  }
}
