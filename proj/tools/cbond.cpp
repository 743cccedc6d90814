// Command-line front end: price, boundary, ode-check, simulate, saddle,
// sweep, table1, figure-data. Parameters come from a JSON config file
// and/or inline flags (flags win); every output embeds the resolved config
// in its header. Exit codes: 0 ok, 1 domain error, 2 numerical failure,
// 3 table mismatch, 64 usage.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbond/analytic.hpp"
#include "cbond/asymptotics.hpp"
#include "cbond/free_boundary.hpp"
#include "cbond/io.hpp"
#include "cbond/lattice.hpp"
#include "cbond/model.hpp"
#include "cbond/ode_oracle.hpp"
#include "cbond/simulate.hpp"

namespace {

using cbond::ModelParams;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitUsage = 64;

struct ParamFlags {
  std::string config_path;
  std::optional<double> r, q, sigma, lambda, c, K, gamma;

  void attach(CLI::App* cmd, const std::string& config_flag = "--config") {
    cmd->add_option(config_flag, config_path, "JSON file with the seven parameter keys");
    auto opt = [&](const std::string& name, std::optional<double>& slot, const char* help) {
      cmd->add_option_function<double>(
          name, [&slot](double v) { slot = v; }, help);
    };
    opt("--r", r, "interest rate (1/year)");
    opt("--q", q, "dividend rate (1/year)");
    opt("--sigma", sigma, "volatility (1/sqrt(year))");
    opt("--lambda", lambda, "Poisson intensity (1/year)");
    opt("--c", c, "coupon rate (currency/year)");
    opt("--K", K, "surrender price");
    opt("--gamma", gamma, "conversion rate in (0, 1]");
  }

  ModelParams resolve() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw cbond::DomainError("cannot open config file '" + config_path + "'");
      in >> j;
    }
    auto put = [&j](const char* key, const std::optional<double>& v) {
      if (v) j[key] = *v;
    };
    put("r", r);
    put("q", q);
    put("sigma", sigma);
    put("lambda", lambda);
    put("c", c);
    put("K", K);
    put("gamma", gamma);
    return cbond::params_from_json(j);
  }
};

std::string config_echo_csv(const ModelParams& p) {
  std::ostringstream os;
  os << "# config: r=" << cbond::fmt_csv(p.r) << " q=" << cbond::fmt_csv(p.q)
     << " sigma=" << cbond::fmt_csv(p.sigma) << " lambda=" << cbond::fmt_csv(p.lambda)
     << " c=" << cbond::fmt_csv(p.c) << " K=" << cbond::fmt_csv(p.K)
     << " gamma=" << cbond::fmt_csv(p.gamma) << "\n";
  return os.str();
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty() || out_path == "-") {
    std::cout << contents;
    return;
  }
  cbond::atomic_write_file(out_path, contents);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw cbond::DomainError(std::string("cannot parse ") + what + " list entry '" + item +
                               "'");
    }
  }
  if (out.empty()) throw cbond::DomainError(std::string("empty ") + what + " list");
  return out;
}

// ---- price ---------------------------------------------------------------

int cmd_price(const ParamFlags& flags, double s0, const std::string& dump_path,
              const std::string& solution_path, const std::string& out_path) {
  cbond::AnalyticSolution sol;
  if (!solution_path.empty()) {
    std::ifstream in(solution_path);
    if (!in) throw cbond::DomainError("cannot open solution file '" + solution_path + "'");
    json j;
    in >> j;
    sol = cbond::solution_from_json(j);
  } else {
    sol = cbond::build_constrained_solution(flags.resolve());
  }
  const cbond::ValueBounds vb = cbond::bounds(sol.params, s0);
  json out{
      {"config", cbond::params_to_json(sol.params)},
      {"regime", to_string(sol.regime)},
      {"s0", s0},
      {"value", cbond::price_constrained(sol, s0)},
      {"bounds", {{"lower", vb.lower}, {"upper", vb.upper}}},
      {"x_star", sol.x_star},
      {"sbar", sol.sbar},
  };
  if (!dump_path.empty())
    cbond::atomic_write_file(dump_path, cbond::solution_to_json(sol).dump(2) + "\n");
  emit(out_path, out.dump(2) + "\n");
  return kExitOk;
}

// ---- boundary --------------------------------------------------------------

int cmd_boundary(const ParamFlags& flags, const std::string& out_path) {
  const ModelParams p = flags.resolve();
  const double x = cbond::solve_conversion_boundary(p);
  const cbond::PastingReport rep = cbond::smooth_pasting_report(p, x);
  std::ostringstream os;
  os << config_echo_csv(p);
  os << "lambda,c,x_star,residual,deriv_mismatch_rel,deriv_below_gamma,convex_below,"
        "concave_above,dominated_above,pasting_pass\n";
  os << cbond::fmt_csv(p.lambda) << ',' << cbond::fmt_csv(p.c) << ',' << cbond::fmt_csv(x)
     << ',' << cbond::fmt_csv(cbond::boundary_residual(p, x)) << ','
     << cbond::fmt_csv(rep.rel_mismatch) << ',' << rep.deriv_below_gamma << ','
     << rep.convex_below << ',' << rep.concave_above << ',' << rep.dominated_above << ','
     << rep.pass << "\n";
  emit(out_path, os.str());
  return kExitOk;
}

// ---- ode-check ---------------------------------------------------------------

int cmd_ode_check(const ParamFlags& flags, int nodes, double span, bool with_order,
                  const std::string& out_path) {
  const ModelParams p = flags.resolve();
  const double s_min = cbond::threshold_sbar(p) * std::exp(-span);
  const cbond::AnalyticSolution sol = cbond::build_constrained_solution(p);
  const cbond::GridSolution grid = cbond::solve_penalized_ode(p, nodes, s_min);
  const cbond::ErrorReport err = cbond::compare_to_analytic(grid, sol);

  std::ostringstream os;
  os << config_echo_csv(p);
  os << "# nodes=" << nodes << " s_min=" << cbond::fmt_csv(s_min)
     << " iterations=" << grid.iterations << " residual_norm=" << cbond::fmt_csv(grid.residual_norm)
     << "\n";
  os << "# sup_error=" << cbond::fmt_csv(err.sup_error)
     << " l2_error=" << cbond::fmt_csv(err.l2_error)
     << " truncation_bound=" << cbond::fmt_csv(err.truncation_bound) << "\n";
  if (with_order)
    os << "# convergence_order=" << cbond::fmt_csv(cbond::estimate_convergence_order(
              p, nodes / 2, s_min)) << " (from nodes " << nodes / 2 << " vs " << nodes << ")\n";
  os << "s,analytic,grid,abs_error\n";
  for (std::size_t i = 0; i < grid.s.size(); ++i) {
    const double a = cbond::price_constrained(sol, grid.s[i]);
    os << cbond::fmt_csv(grid.s[i]) << ',' << cbond::fmt_csv(a) << ','
       << cbond::fmt_csv(grid.value[i]) << ',' << cbond::fmt_csv(std::abs(grid.value[i] - a))
       << "\n";
  }
  emit(out_path, os.str());
  return kExitOk;
}

// ---- simulate / saddle ----------------------------------------------------

cbond::StrategyPair pick_strategy(const ModelParams& p, const std::string& name) {
  if (name == "optimal") return cbond::optimal_strategy(p);
  for (const auto& pair : cbond::deviation_roster(p))
    if (pair.name == name) return pair;
  std::ostringstream os;
  os << "unknown strategy '" << name << "'; available: optimal";
  for (const auto& pair : cbond::deviation_roster(p))
    if (!pair.name.empty() && pair.name != "optimal") os << ", " << pair.name;
  throw cbond::DomainError(os.str());
}

std::string report_csv(const ModelParams& p, const cbond::SimulationReport& rep) {
  std::ostringstream os;
  os << config_echo_csv(p);
  os << "# seed=" << rep.seed << " n_paths=" << rep.n_paths << "\n";
  os << "strategy,estimate,std_error,frac_convert,frac_call,frac_truncated\n";
  os << rep.strategy << ',' << cbond::fmt_csv(rep.estimate) << ','
     << cbond::fmt_csv(rep.std_error) << ',' << cbond::fmt_csv(rep.frac_convert) << ','
     << cbond::fmt_csv(rep.frac_call) << ',' << cbond::fmt_csv(rep.frac_truncated) << "\n";
  return os.str();
}

json report_json(const cbond::SimulationReport& rep) {
  return {
      {"strategy", rep.strategy},
      {"estimate", rep.estimate},
      {"std_error", rep.std_error},
      {"n_paths", rep.n_paths},
      {"frac_convert", rep.frac_convert},
      {"frac_call", rep.frac_call},
      {"frac_truncated", rep.frac_truncated},
      {"seed", rep.seed},
  };
}

int cmd_simulate(const ParamFlags& flags, double s0, long paths, std::uint64_t seed,
                 double monitor, const std::string& strategy, const std::string& format,
                 const std::string& out_path) {
  const ModelParams p = flags.resolve();
  cbond::SimConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = seed;
  cfg.monitor_step = monitor;
  const cbond::StrategyPair strat = pick_strategy(p, strategy);
  const cbond::SimulationReport rep = cbond::simulate_value(p, s0, strat, cfg);
  if (format == "json") {
    json out{{"config", cbond::params_to_json(p)}, {"s0", s0}, {"report", report_json(rep)}};
    emit(out_path, out.dump(2) + "\n");
  } else {
    emit(out_path, report_csv(p, rep));
  }
  return kExitOk;
}

int cmd_saddle(const ParamFlags& flags, double s0, long paths, std::uint64_t seed,
               double monitor, const std::string& format, const std::string& out_path) {
  const ModelParams p = flags.resolve();
  cbond::SimConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = seed;
  cfg.monitor_step = monitor;
  const cbond::SaddleReport rep = cbond::saddle_check(p, s0, cfg);
  if (format == "json") {
    json devs = json::array();
    for (const auto& d : rep.deviations)
      devs.push_back({{"label", d.label},
                      {"investor_side", d.investor_side},
                      {"gap", d.gap},
                      {"paired_se", d.paired_se},
                      {"report", report_json(d.report)}});
    json out{{"config", cbond::params_to_json(p)},
             {"s0", s0},
             {"optimal", report_json(rep.optimal)},
             {"deviations", devs}};
    emit(out_path, out.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << config_echo_csv(p);
    os << "# seed=" << rep.optimal.seed << " n_paths=" << rep.optimal.n_paths
       << " s0=" << cbond::fmt_csv(s0) << "\n";
    os << "strategy,estimate,std_error,gap_vs_optimal,paired_se\n";
    os << rep.optimal.strategy << ',' << cbond::fmt_csv(rep.optimal.estimate) << ','
       << cbond::fmt_csv(rep.optimal.std_error) << ",0,0\n";
    for (const auto& d : rep.deviations)
      os << d.label << ',' << cbond::fmt_csv(d.report.estimate) << ','
         << cbond::fmt_csv(d.report.std_error) << ',' << cbond::fmt_csv(d.gap) << ','
         << cbond::fmt_csv(d.paired_se) << "\n";
    emit(out_path, os.str());
  }
  return kExitOk;
}

// ---- sweep / table1 / figure-data ------------------------------------------

int cmd_sweep(const ParamFlags& flags, const std::string& lambdas_text,
              const std::string& coupons_text, const std::string& out_path) {
  const ModelParams tmpl = flags.resolve();
  const std::vector<double> lambdas = parse_list(lambdas_text, "lambda");
  const std::vector<double> coupons = parse_list(coupons_text, "coupon");
  const std::vector<cbond::SweepRow> rows = cbond::boundary_sweep(tmpl, lambdas, coupons);
  std::ostringstream os;
  os << config_echo_csv(tmpl);
  os << "lambda,c,x_star_lambda,s_bar_lambda,limit_target,gap,status\n";
  bool any_failed = false;
  for (const auto& row : rows) {
    if (row.failed) {
      any_failed = true;
      os << cbond::fmt_csv(row.lambda) << ',' << cbond::fmt_csv(row.c) << ",,,,,failed: "
         << row.error << "\n";
    } else {
      os << cbond::fmt_csv(row.lambda) << ',' << cbond::fmt_csv(row.c) << ','
         << cbond::fmt_csv(row.x_star_lambda) << ',' << cbond::fmt_csv(row.s_bar_lambda) << ','
         << cbond::fmt_csv(row.limit_target) << ',' << cbond::fmt_csv(row.gap) << ",ok\n";
    }
  }
  emit(out_path, os.str());
  return any_failed ? kExitNumerical : kExitOk;
}

int cmd_table1(const std::string& out_path, double tolerance) {
  const cbond::Table1Result res = cbond::reproduce_table1(tolerance);
  std::ostringstream os;
  os << config_echo_csv(res.params);
  os << "# note: " << cbond::table1_gamma_note() << "\n";
  os << "# tolerance=" << cbond::fmt_csv(res.tolerance)
     << " elapsed_seconds=" << cbond::fmt_csv(res.elapsed_seconds)
     << " status=" << (res.pass ? "pass" : "MISMATCH") << "\n";
  os << "row";
  for (double c : res.coupons) os << ",c=" << cbond::fmt_csv(c);
  os << "\n";
  for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
    os << "lambda=" << cbond::fmt_csv(res.lambdas[i]);
    for (double v : res.x_grid[i]) os << ',' << cbond::fmt_csv(v);
    os << "\n";
  }
  os << "x_star";
  for (double v : res.x_star_row) os << ',' << cbond::fmt_csv(v);
  os << "\ns_bar";
  for (double v : res.s_bar_row) os << ',' << cbond::fmt_csv(v);
  os << "\nclassical_limit";
  for (double v : res.limit_row) os << ',' << cbond::fmt_csv(v);
  os << "\n";
  for (const auto& m : res.mismatches) os << "# mismatch: " << m << "\n";
  emit(out_path, os.str());
  if (!res.pass) {
    for (const auto& m : res.mismatches) std::cerr << "mismatch: " << m << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_figure_data(const ParamFlags& flags, const std::string& lambdas_text, double s_lo,
                    double s_hi, int n, const std::string& out_path) {
  const ModelParams tmpl = flags.resolve();
  const std::vector<double> lambdas = parse_list(lambdas_text, "lambda");
  std::vector<cbond::AnalyticSolution> sols;
  for (double lam : lambdas) {
    ModelParams p = tmpl;
    p.lambda = lam;
    sols.push_back(cbond::build_constrained_solution(cbond::validate_params(p)));
  }
  const cbond::ClassicalSolution classical = cbond::build_classical_solution(tmpl);

  std::ostringstream os;
  os << config_echo_csv(tmpl);
  for (const auto& sol : sols)
    os << "# lambda=" << cbond::fmt_csv(sol.params.lambda)
       << " x_star=" << cbond::fmt_csv(sol.x_star) << " sbar=" << cbond::fmt_csv(sol.sbar)
       << "\n";
  os << "# classical x3=" << cbond::fmt_csv(classical.x3)
     << " sbar=" << cbond::fmt_csv(classical.sbar) << "\n";
  os << "s";
  for (double lam : lambdas) os << ",v_lambda_" << cbond::fmt_csv(lam);
  os << ",v_classical\n";
  for (int i = 0; i < n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * double(i) / double(n - 1);
    os << cbond::fmt_csv(s);
    for (const auto& sol : sols) os << ',' << cbond::fmt_csv(cbond::price_constrained(sol, s));
    os << ',' << cbond::fmt_csv(cbond::price_classical(classical, s)) << "\n";
  }
  emit(out_path, os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained convertible bond pricer (stopping only at Poisson arrival times)"};
  app.require_subcommand(1);

  // price
  auto* price = app.add_subcommand("price", "closed-form price at s0");
  ParamFlags price_flags;
  price_flags.attach(price);
  double price_s0 = 1.0;
  std::string price_dump, price_solution, price_out;
  price->add_option("--s0", price_s0, "spot price (default 1.0)");
  price->add_option("--dump-solution", price_dump, "write the solution JSON here");
  price->add_option("--solution", price_solution, "price from a previously dumped solution");
  price->add_option("--out", price_out, "output path (default stdout)");

  // boundary
  auto* boundary = app.add_subcommand("boundary", "Case III conversion boundary + pasting");
  ParamFlags boundary_flags;
  boundary_flags.attach(boundary);
  std::string boundary_out;
  boundary->add_option("--out", boundary_out, "output path (default stdout)");

  // ode-check
  auto* ode = app.add_subcommand("ode-check", "finite-difference oracle vs closed form");
  ParamFlags ode_flags;
  ode_flags.attach(ode);
  int ode_nodes = 2000;
  double ode_span = 6.0;
  bool ode_order = false;
  std::string ode_out;
  ode->add_option("--nodes", ode_nodes, "grid nodes (default 2000)");
  ode->add_option("--span", ode_span, "ln(sbar) - ln(s_min) (default 6)");
  ode->add_flag("--order", ode_order, "also estimate the convergence order");
  ode->add_option("--out", ode_out, "output path (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo payoff under a strategy pair");
  ParamFlags sim_flags;
  sim_flags.attach(sim, "--case-params");
  sim->add_option("--config", sim_flags.config_path, "alias for --case-params");
  double sim_s0 = 1.0, sim_monitor = 0.0;
  long sim_paths = 100000;
  std::uint64_t sim_seed = 42;
  std::string sim_strategy = "optimal", sim_format = "csv", sim_out;
  sim->add_option("--s0", sim_s0, "spot price (default 1.0)");
  sim->add_option("--paths", sim_paths, "number of paths");
  sim->add_option("--seed", sim_seed, "RNG seed (default 42)");
  sim->add_option("--monitor-step", sim_monitor,
                  "barrier monitoring step in years (default min(1/lambda, 0.01)/4)");
  sim->add_option("--strategy", sim_strategy, "optimal or a named deviation");
  sim->add_option("--format", sim_format, "csv|json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->add_option("--out", sim_out, "output path (default stdout)");

  // saddle
  auto* saddle = app.add_subcommand("saddle", "optimal pair vs unilateral deviations (CRN)");
  ParamFlags saddle_flags;
  saddle_flags.attach(saddle);
  double saddle_s0 = 1.0, saddle_monitor = 0.0;
  long saddle_paths = 100000;
  std::uint64_t saddle_seed = 42;
  std::string saddle_format = "csv", saddle_out;
  saddle->add_option("--s0", saddle_s0, "spot price (default 1.0)");
  saddle->add_option("--paths", saddle_paths, "number of paths");
  saddle->add_option("--seed", saddle_seed, "RNG seed (default 42)");
  saddle->add_option("--monitor-step", saddle_monitor, "barrier monitoring step (years)");
  saddle->add_option("--format", saddle_format, "csv|json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  saddle->add_option("--out", saddle_out, "output path (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "conversion boundary over a (lambda, c) grid");
  ParamFlags sweep_flags;
  sweep_flags.attach(sweep);
  std::string sweep_lambdas = "0.1,0.5,1,5,10,100,10000";
  std::string sweep_coupons = "0.005,0.01,0.015,0.02,0.025,0.03";
  std::string sweep_out;
  sweep->add_option("--lambdas", sweep_lambdas, "comma-separated lambda grid");
  sweep->add_option("--coupons", sweep_coupons, "comma-separated coupon grid");
  sweep->add_option("--out", sweep_out, "output path (default stdout)");

  // table1
  auto* table1 = app.add_subcommand("table1", "reproduce the published boundary table");
  std::string table1_out;
  double table1_tol = 1e-3;
  table1->add_option("--out", table1_out, "output path (default stdout)");
  table1->add_option("--tolerance", table1_tol, "absolute cell tolerance (default 1e-3)");

  // figure-data
  auto* fig = app.add_subcommand("figure-data", "price curves for plotting");
  ParamFlags fig_flags;
  fig_flags.attach(fig);
  std::string fig_lambdas = "0.1,1,100";
  double fig_slo = 0.05, fig_shi = 1.6;
  int fig_n = 200;
  std::string fig_out;
  fig->add_option("--lambdas", fig_lambdas, "comma-separated lambda list");
  fig->add_option("--s-min", fig_slo, "lowest spot (default 0.05)");
  fig->add_option("--s-max", fig_shi, "highest spot (default 1.6)");
  fig->add_option("--n", fig_n, "grid points (default 200)");
  fig->add_option("--out", fig_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (price->parsed())
      return cmd_price(price_flags, price_s0, price_dump, price_solution, price_out);
    if (boundary->parsed()) return cmd_boundary(boundary_flags, boundary_out);
    if (ode->parsed())
      return cmd_ode_check(ode_flags, ode_nodes, ode_span, ode_order, ode_out);
    if (sim->parsed()) {
      if (sim_paths <= 0) {
        std::cerr << "usage error: --paths must be positive\n";
        return kExitUsage;
      }
      return cmd_simulate(sim_flags, sim_s0, sim_paths, sim_seed, sim_monitor, sim_strategy,
                          sim_format, sim_out);
    }
    if (saddle->parsed()) {
      if (saddle_paths <= 0) {
        std::cerr << "usage error: --paths must be positive\n";
        return kExitUsage;
      }
      return cmd_saddle(saddle_flags, saddle_s0, saddle_paths, saddle_seed, saddle_monitor,
                        saddle_format, saddle_out);
    }
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_lambdas, sweep_coupons, sweep_out);
    if (table1->parsed()) return cmd_table1(table1_out, table1_tol);
    if (fig->parsed())
      return cmd_figure_data(fig_flags, fig_lambdas, fig_slo, fig_shi, fig_n, fig_out);
  } catch (const cbond::MismatchError& e) {
    std::cerr << "mismatch: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const cbond::BracketError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cbond::NoConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cbond::PastingViolation& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cbond::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cbond::SeedError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cbond::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}
