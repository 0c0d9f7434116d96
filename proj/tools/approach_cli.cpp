// Command-line surface: check targets, simulate strategies, sweep
// convergence curves, reproduce the signalless counterexample, and compute
// incomplete-information values.
//
// Exit codes: 0 = success / Approachable, 2 = NotApproachable (or a failed
// reproduction), 1 = any error (malformed input, missing file, bad flag).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "approach/approach.hpp"
#include "approach/registry.hpp"

namespace {

using approach::io::json;

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// A strategy argument is a registry name, inline JSON, or a path to a JSON
// spec file.
approach::io::StrategySpec parse_strategy_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{')
    return approach::io::strategy_spec_from_json(json::parse(arg), "strategy");
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json")
    return approach::io::strategy_spec_from_json(
        approach::io::load_json_file(arg), "strategy");
  approach::io::StrategySpec spec;
  spec.name = arg;
  return spec;
}

// Checkpoints 1, 2, 5, 10, 20, 50, ... capped by and including the horizon.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t base = 1; base <= horizon; base *= 10)
    for (std::uint64_t mult : {1, 2, 5}) {
      const std::uint64_t n = base * mult;
      if (n < horizon) out.push_back(n);
    }
  out.push_back(horizon);
  return out;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << std::endl;
  else
    approach::io::save_json_file(out_path, j);
}

// Fill flag values from the config object for flags not given on the
// command line.
template <class T>
void from_config(const json& cfg, const CLI::Option* opt, const char* key,
                 T& var) {
  if (opt->count() == 0 && cfg.contains(key)) var = cfg[key].get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return approach::io::load_json_file(path);
}

// ----------------------------------------------------------------------
// check
// ----------------------------------------------------------------------

struct CheckArgs {
  std::string config, game, target, monitoring = "partial", out;
  double mesh = 1.0 / 64.0;
  double tolerance = approach::tol::optimizer;
};

int cmd_check(const CheckArgs& a) {
  const approach::GameSpec game =
      approach::io::game_from_json(approach::io::load_json_file(a.game));
  const approach::ConvexTarget target =
      approach::io::target_from_json(approach::io::load_json_file(a.target));
  approach::CheckOptions opt;
  opt.mesh = a.mesh;
  opt.tolerance = a.tolerance;
  opt.min_mesh = std::min(opt.min_mesh, a.mesh);
  approach::Certificate cert;
  if (a.monitoring == "full")
    cert = approach::check_convex_full(game, target, opt);
  else if (a.monitoring == "partial")
    cert = approach::check_convex_partial(game, target, a.mesh, opt);
  else
    throw std::runtime_error("--monitoring must be 'partial' or 'full'");
  json out = approach::io::certificate_to_json(cert);
  out["game"] = a.game;
  out["target"] = a.target;
  emit(out, a.out);
  return cert.approachable() ? 0 : 2;
}

// ----------------------------------------------------------------------
// simulate
// ----------------------------------------------------------------------

struct SimulateArgs {
  std::string config, game, target, strategy = "blackwell",
              adversary = "uniform", out = ".";
  std::uint64_t horizon = 10000;
  std::size_t seeds = 1;
  double epsilon = -1.0;  // <0: leave the strategy default
  bool record_stages = false;
};

int cmd_simulate(const SimulateArgs& a) {
  namespace io = approach::io;
  const approach::GameSpec game =
      io::game_from_json(io::load_json_file(a.game));
  const approach::ConvexTarget target =
      io::target_from_json(io::load_json_file(a.target));
  io::StrategySpec sigma_spec = parse_strategy_arg(a.strategy);
  io::StrategySpec tau_spec = parse_strategy_arg(a.adversary);
  if (a.epsilon >= 0.0) sigma_spec.params["epsilon"] = a.epsilon;

  approach::Certificate cert;
  const bool needs_cert = tau_spec.name == "best_response";
  if (needs_cert) cert = approach::check_convex_partial(game, target);

  std::filesystem::create_directories(a.out);
  const std::string game_id = stem_of(a.game);

  json summary;
  summary["game"] = a.game;
  summary["target"] = a.target;
  summary["strategy"] = sigma_spec.name;
  summary["adversary"] = tau_spec.name;
  summary["horizon"] = a.horizon;
  json per_seed = json::array();

  double mean_final = 0.0;
  for (std::size_t seed = 0; seed < a.seeds; ++seed) {
    approach::P1Factory opponent = [&, seed]() {
      return io::make_p1(sigma_spec, game, &target, seed);
    };
    std::unique_ptr<approach::Player1Strategy> sigma =
        io::make_p1(sigma_spec, game, &target, seed);
    std::unique_ptr<approach::Player2Strategy> tau =
        io::make_p2(tau_spec, game, &target, opponent,
                    needs_cert ? &cert : nullptr, seed);

    approach::RunOptions opts;
    opts.horizon = a.horizon;
    opts.seed = seed;
    opts.record_stages = a.record_stages;
    opts.checkpoints = default_checkpoints(a.horizon);
    opts.game_id = game_id;
    opts.target_id = stem_of(a.target);
    const approach::Trace trace = approach::run(game, *sigma, *tau, opts);

    const std::string csv_path =
        (std::filesystem::path(a.out) /
         (game_id + "_" + sigma_spec.name + "_" + tau_spec.name + "_" +
          std::to_string(seed) + ".csv"))
            .string();
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    io::write_trace_csv(csv, trace, target);

    const double d = target.distance(trace.final_avg);
    mean_final += d;
    json row = io::trace_to_json(trace, target);
    row["csv"] = csv_path;
    per_seed.push_back(std::move(row));
  }
  mean_final /= static_cast<double>(a.seeds);
  summary["seeds"] = per_seed;
  summary["mean_final_distance"] = mean_final;
  emit(summary, (std::filesystem::path(a.out) /
                 (game_id + "_" + sigma_spec.name + "_" + tau_spec.name +
                  "_summary.json"))
                    .string());
  std::cout << "mean final distance over " << a.seeds
            << " seed(s): " << mean_final << std::endl;
  return 0;
}

// ----------------------------------------------------------------------
// sweep
// ----------------------------------------------------------------------

struct SweepArgs {
  std::string config, game, target, strategy = "blackwell", out = ".";
  std::vector<std::string> adversaries = {"uniform"};
  std::vector<std::uint64_t> horizons = {100, 1000, 10000};
  std::size_t seeds = 20;
  double epsilon = -1.0;
};

int cmd_sweep(const SweepArgs& a) {
  namespace io = approach::io;
  const approach::GameSpec game =
      io::game_from_json(io::load_json_file(a.game));
  const approach::ConvexTarget target =
      io::target_from_json(io::load_json_file(a.target));
  io::StrategySpec sigma_spec = parse_strategy_arg(a.strategy);
  if (a.epsilon >= 0.0) sigma_spec.params["epsilon"] = a.epsilon;

  approach::Certificate cert;
  bool has_cert = false;
  approach::SigmaFactory sigma_factory = [&]() {
    return io::make_p1(sigma_spec, game, &target, 0);
  };
  std::vector<approach::NamedAdversary> adversaries;
  for (const std::string& arg : a.adversaries) {
    io::StrategySpec spec = parse_strategy_arg(arg);
    if (spec.name == "best_response" && !has_cert) {
      cert = approach::check_convex_partial(game, target);
      has_cert = true;
    }
    approach::P1Factory opponent = [&, spec]() {
      return io::make_p1(sigma_spec, game, &target, 0);
    };
    adversaries.push_back(approach::NamedAdversary{
        spec.name, [&, spec, opponent]() {
          return io::make_p2(spec, game, &target, opponent,
                             has_cert ? &cert : nullptr, 0);
        }});
  }

  const approach::RunStats stats = approach::sweep(
      game, target, sigma_factory, adversaries, a.horizons, a.seeds);

  std::filesystem::create_directories(a.out);
  const std::string base = stem_of(a.game) + "_" + sigma_spec.name + "_sweep";
  json out = io::run_stats_to_json(stats);
  out["game"] = a.game;
  out["target"] = a.target;
  out["strategy"] = sigma_spec.name;
  emit(out, (std::filesystem::path(a.out) / (base + ".json")).string());

  const std::string csv_path =
      (std::filesystem::path(a.out) / (base + ".csv")).string();
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  csv.precision(12);
  csv << "adversary,n,mean_d,mean_dsq,q10,q50,q90\n";
  for (std::size_t ai = 0; ai < stats.adversary_names.size(); ++ai)
    for (const approach::CheckpointStat& s : stats.per_adversary[ai])
      csv << stats.adversary_names[ai] << "," << s.n << "," << s.mean_d << ","
          << s.mean_dsq << "," << s.q10 << "," << s.q50 << "," << s.q90
          << "\n";
  std::cout << "log-log slope of mean d^2: " << stats.loglog_slope_dsq
            << std::endl;
  return 0;
}

// ----------------------------------------------------------------------
// counterexample
// ----------------------------------------------------------------------

struct CounterexampleArgs {
  std::string config, out;
  std::size_t max_p = 4;
  std::size_t excluder_seeds = 100;
  std::uint64_t excluder_horizon = 10000;
  std::size_t weak_k = 2, weak_m = 4, weak_runs = 2000;
  std::uint64_t weak_block = 10000;
  std::uint64_t seed = 0;
};

int cmd_counterexample(const CounterexampleArgs& a) {
  approach::ExampleReportOptions opt;
  opt.max_p = static_cast<int>(a.max_p);
  opt.excluder_seeds = a.excluder_seeds;
  opt.excluder_horizon = a.excluder_horizon;
  opt.weak_k = static_cast<int>(a.weak_k);
  opt.weak_M = static_cast<int>(a.weak_m);
  opt.weak_runs = a.weak_runs;
  opt.weak_block = a.weak_block;
  opt.seed = a.seed;
  const approach::ExampleReport report = approach::run_example_report(opt);

  auto line = [](const char* name, bool ok) {
    std::cout << (ok ? "pass  " : "FAIL  ") << name << std::endl;
  };
  line("checker: full monitoring approachable",
       report.full_certificate.approachable());
  line("checker: no-signal deficit 1/4",
       !report.partial_certificate.approachable() &&
           std::abs(report.partial_certificate.deficit - 0.25) <= 1e-3);
  line("threshold excluder pushes mean distance to ~1/4", report.excluder.pass);
  line("block strategy meets 1/p endpoint bounds", report.blocks.pass);
  line("weak approachability frequency bound", report.weak.pass);

  emit(approach::io::example_report_to_json(report), a.out);
  return report.pass ? 0 : 2;
}

// ----------------------------------------------------------------------
// value
// ----------------------------------------------------------------------

struct ValueArgs {
  std::string config, iigame, out;
  std::size_t prior_divisions = 16;
  double mesh = 0.125;
  double aux_mesh = 0.125;
  bool simulate = false;
  std::uint64_t horizon = 10000;
  std::size_t seeds = 50;
};

int cmd_value(const ValueArgs& a) {
  namespace io = approach::io;
  const approach::IIGame g = io::ii_from_json(io::load_json_file(a.iigame));
  const approach::CavResult cav =
      approach::cav_u(g, g.prior(), a.prior_divisions, a.mesh);

  json out;
  out["iigame"] = a.iigame;
  out["prior"] = g.prior();
  out["u_at_p"] = cav.u_at_p;
  out["cav_u"] = cav.value;
  out["m"] = cav.m;
  out["grid_points"] = cav.grid.size();

  if (a.simulate) {
    const approach::AuxiliaryGame aux = approach::auxiliary_game(g, cav.m);
    const approach::AuxCheck chk =
        approach::check_auxiliary(g, aux.target.box_hi(), a.aux_mesh);

    // Informed player: per-state optimal stationary mixture.
    std::vector<approach::MixedAction> profile;
    for (std::size_t k = 0; k < g.num_states(); ++k) {
      approach::DenseMatrix M(g.num_rows(), g.num_cols());
      for (std::size_t i = 0; i < g.num_rows(); ++i)
        for (std::size_t j = 0; j < g.num_cols(); ++j)
          M.at(i, j) = g.payoff(k, i, j);
      profile.push_back(approach::matrix_game_value(M).x);
    }
    // The guarantee controls the drawn state's conditional average; its
    // expectation over the state draw is <m, p> = Cav(u)(p). The
    // prior-weighted counterfactual average is reported alongside but is
    // only meaningful when the profile is state-independent.
    double mean_true_state = 0.0, mean_weighted = 0.0;
    for (std::size_t seed = 0; seed < a.seeds; ++seed) {
      const approach::IIRunResult r =
          approach::ii_run(g, profile, chk.types, a.horizon, seed);
      mean_true_state += r.per_state_avg[r.state_drawn];
      mean_weighted += r.weighted;
    }
    mean_true_state /= static_cast<double>(a.seeds);
    mean_weighted /= static_cast<double>(a.seeds);
    out["simulation"] =
        json{{"aux_deficit", chk.deficit},
             {"horizon", a.horizon},
             {"seeds", a.seeds},
             {"mean_true_state_payoff", mean_true_state},
             {"mean_weighted_payoff", mean_weighted},
             {"bound", cav.value},
             {"within_slack", mean_true_state <= cav.value + 0.1}};
  }
  emit(out, a.out);
  std::cout << "u(p) = " << cav.u_at_p << ", Cav(u)(p) = " << cav.value
            << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approachability toolkit for repeated vector-payoff games"};
  app.require_subcommand(1);

  CheckArgs ca;
  CLI::App* check = app.add_subcommand(
      "check", "Decide approachability of a convex target");
  auto* ca_game = check->add_option("--game", ca.game, "Game JSON file");
  auto* ca_target = check->add_option("--target", ca.target, "Target JSON file");
  auto* ca_mon = check->add_option("--monitoring", ca.monitoring,
                                   "'partial' (default) or 'full'");
  auto* ca_mesh = check->add_option("--mesh", ca.mesh, "Initial flag-grid mesh");
  auto* ca_tol = check->add_option("--tolerance", ca.tolerance,
                                   "Approachability deficit tolerance");
  auto* ca_out = check->add_option("--out", ca.out, "Certificate output path");
  check->add_option("--config", ca.config, "JSON config (flags override)");

  SimulateArgs sa;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a strategy against an adversary, write CSV traces");
  auto* sa_game = simulate->add_option("--game", sa.game, "Game JSON file");
  auto* sa_target =
      simulate->add_option("--target", sa.target, "Target JSON file");
  auto* sa_strategy = simulate->add_option(
      "--strategy", sa.strategy, "Strategy name, JSON, or spec file");
  auto* sa_adv = simulate->add_option("--adversary", sa.adversary,
                                      "Adversary name, JSON, or spec file");
  auto* sa_horizon =
      simulate->add_option("--horizon", sa.horizon, "Stages per run");
  auto* sa_seeds = simulate->add_option("--seeds", sa.seeds, "Number of seeds");
  auto* sa_eps = simulate->add_option("--epsilon", sa.epsilon,
                                      "Override the strategy's epsilon");
  auto* sa_out = simulate->add_option("--out", sa.out, "Output directory");
  auto* sa_rec = simulate->add_flag("--record-stages", sa.record_stages,
                                    "Keep per-stage records in memory");
  simulate->add_option("--config", sa.config, "JSON config (flags override)");

  SweepArgs wa;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Convergence statistics across horizons and adversaries");
  auto* wa_game = sweep_cmd->add_option("--game", wa.game, "Game JSON file");
  auto* wa_target =
      sweep_cmd->add_option("--target", wa.target, "Target JSON file");
  auto* wa_strategy = sweep_cmd->add_option("--strategy", wa.strategy,
                                            "Strategy name, JSON, or file");
  auto* wa_adv = sweep_cmd->add_option(
      "--adversary", wa.adversaries, "Adversary specs (repeatable)");
  auto* wa_hor = sweep_cmd->add_option("--horizon", wa.horizons,
                                       "Checkpoint horizons (repeatable)");
  auto* wa_seeds = sweep_cmd->add_option("--seeds", wa.seeds, "Seeds per cell");
  auto* wa_eps = sweep_cmd->add_option("--epsilon", wa.epsilon,
                                       "Override the strategy's epsilon");
  auto* wa_out = sweep_cmd->add_option("--out", wa.out, "Output directory");
  sweep_cmd->add_option("--config", wa.config, "JSON config (flags override)");

  CounterexampleArgs xa;
  CLI::App* cx = app.add_subcommand(
      "counterexample",
      "Reproduce the signalless game: checker, excluder, blocks, weak runs");
  auto* xa_maxp = cx->add_option("--max-p", xa.max_p, "Deepest block index");
  auto* xa_seeds =
      cx->add_option("--seeds", xa.excluder_seeds, "Excluder seeds");
  auto* xa_hor =
      cx->add_option("--horizon", xa.excluder_horizon, "Excluder horizon");
  auto* xa_wk = cx->add_option("--weak-k", xa.weak_k, "Weak targets C_k");
  auto* xa_wm = cx->add_option("--weak-M", xa.weak_m, "Weak grid size M");
  auto* xa_wr = cx->add_option("--weak-runs", xa.weak_runs, "Weak runs");
  auto* xa_wb = cx->add_option("--weak-block", xa.weak_block,
                               "Weak per-phase block length");
  auto* xa_seed = cx->add_option("--seed", xa.seed, "Base seed");
  auto* xa_out = cx->add_option("--out", xa.out, "Report output path");
  cx->add_option("--config", xa.config, "JSON config (flags override)");

  ValueArgs va;
  CLI::App* value = app.add_subcommand(
      "value", "Incomplete-information value: u(p), Cav(u)(p), hyperplane m");
  auto* va_game =
      value->add_option("--iigame", va.iigame, "Incomplete-info game JSON");
  auto* va_div = value->add_option("--prior-divisions", va.prior_divisions,
                                   "Prior-simplex grid divisions");
  auto* va_mesh = value->add_option("--mesh", va.mesh, "Flag-grid mesh for u");
  auto* va_amesh =
      value->add_option("--aux-mesh", va.aux_mesh, "Auxiliary scan mesh");
  auto* va_sim = value->add_flag("--simulate", va.simulate,
                                 "Also run the end-to-end guarantee check");
  auto* va_hor = value->add_option("--horizon", va.horizon, "Stages per run");
  auto* va_seeds = value->add_option("--seeds", va.seeds, "Simulation seeds");
  auto* va_out = value->add_option("--out", va.out, "Report output path");
  value->add_option("--config", va.config, "JSON config (flags override)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (check->parsed()) {
      const json cfg = load_config(ca.config);
      from_config(cfg, ca_game, "game", ca.game);
      from_config(cfg, ca_target, "target", ca.target);
      from_config(cfg, ca_mon, "monitoring", ca.monitoring);
      from_config(cfg, ca_mesh, "mesh", ca.mesh);
      from_config(cfg, ca_tol, "tolerance", ca.tolerance);
      from_config(cfg, ca_out, "out", ca.out);
      if (ca.game.empty() || ca.target.empty())
        throw std::runtime_error("check requires --game and --target");
      return cmd_check(ca);
    }
    if (simulate->parsed()) {
      const json cfg = load_config(sa.config);
      from_config(cfg, sa_game, "game", sa.game);
      from_config(cfg, sa_target, "target", sa.target);
      from_config(cfg, sa_strategy, "strategy", sa.strategy);
      from_config(cfg, sa_adv, "adversary", sa.adversary);
      from_config(cfg, sa_horizon, "horizon", sa.horizon);
      from_config(cfg, sa_seeds, "seeds", sa.seeds);
      from_config(cfg, sa_eps, "epsilon", sa.epsilon);
      from_config(cfg, sa_out, "out", sa.out);
      from_config(cfg, sa_rec, "record_stages", sa.record_stages);
      if (sa.game.empty() || sa.target.empty())
        throw std::runtime_error("simulate requires --game and --target");
      return cmd_simulate(sa);
    }
    if (sweep_cmd->parsed()) {
      const json cfg = load_config(wa.config);
      from_config(cfg, wa_game, "game", wa.game);
      from_config(cfg, wa_target, "target", wa.target);
      from_config(cfg, wa_strategy, "strategy", wa.strategy);
      from_config(cfg, wa_adv, "adversary", wa.adversaries);
      from_config(cfg, wa_hor, "horizon", wa.horizons);
      from_config(cfg, wa_seeds, "seeds", wa.seeds);
      from_config(cfg, wa_eps, "epsilon", wa.epsilon);
      from_config(cfg, wa_out, "out", wa.out);
      if (wa.game.empty() || wa.target.empty())
        throw std::runtime_error("sweep requires --game and --target");
      return cmd_sweep(wa);
    }
    if (cx->parsed()) {
      const json cfg = load_config(xa.config);
      from_config(cfg, xa_maxp, "max_p", xa.max_p);
      from_config(cfg, xa_seeds, "seeds", xa.excluder_seeds);
      from_config(cfg, xa_hor, "horizon", xa.excluder_horizon);
      from_config(cfg, xa_wk, "weak_k", xa.weak_k);
      from_config(cfg, xa_wm, "weak_M", xa.weak_m);
      from_config(cfg, xa_wr, "weak_runs", xa.weak_runs);
      from_config(cfg, xa_wb, "weak_block", xa.weak_block);
      from_config(cfg, xa_seed, "seed", xa.seed);
      from_config(cfg, xa_out, "out", xa.out);
      return cmd_counterexample(xa);
    }
    if (value->parsed()) {
      const json cfg = load_config(va.config);
      from_config(cfg, va_game, "iigame", va.iigame);
      from_config(cfg, va_div, "prior_divisions", va.prior_divisions);
      from_config(cfg, va_mesh, "mesh", va.mesh);
      from_config(cfg, va_amesh, "aux_mesh", va.aux_mesh);
      from_config(cfg, va_sim, "simulate", va.simulate);
      from_config(cfg, va_hor, "horizon", va.horizon);
      from_config(cfg, va_seeds, "seeds", va.seeds);
      from_config(cfg, va_out, "out", va.out);
      if (va.iigame.empty())
        throw std::runtime_error("value requires --iigame");
      return cmd_value(va);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  std::cerr << "error: no subcommand" << std::endl;
  return 1;
}
