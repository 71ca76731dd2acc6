// Command-line front end: dataset generation, single-instance solving,
// benchmark tables, LP export, and priority-rule discovery.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smtt/bench.hpp"
#include "smtt/core.hpp"
#include "smtt/datagen.hpp"
#include "smtt/discovery.hpp"
#include "smtt/exact.hpp"
#include "smtt/expr.hpp"
#include "smtt/heuristics.hpp"
#include "smtt/http_mutator.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

using nlohmann::json;

json schedule_json(const std::string& method, const smtt::Instance& inst,
                   const smtt::Schedule& sched, double elapsed) {
  json out;
  out["method"] = method;
  out["n"] = inst.jobs();
  out["order"] = sched.order;
  out["objective"] = smtt::total_tardiness(inst, sched);
  out["elapsed_seconds"] = elapsed;
  return out;
}

int cmd_gen(const std::string& out_dir, int n, int per_class,
            std::uint64_t seed, const std::string& dist_name,
            const std::string& grid_name) {
  const smtt::Distribution dist = smtt::distribution_from_name(dist_name);
  const auto grid = grid_name == "training" ? smtt::training_grid(n, dist)
                                            : smtt::test_grid(n, dist);
  const smtt::Dataset ds = smtt::generate_dataset(grid, per_class, seed);
  smtt::write_dataset(ds, out_dir);
  std::cout << "wrote " << ds.total_instances() << " instances in "
            << ds.classes.size() << " classes to " << out_dir << "\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& method,
              const std::string& expr_text, int dp_cap) {
  const smtt::Instance inst = smtt::read_instance(instance_path);
  using clock = std::chrono::steady_clock;

  if (!expr_text.empty()) {
    const smtt::PriorityExpr expr = smtt::PriorityExpr::parse(expr_text);
    const auto t0 = clock::now();
    smtt::Schedule sched{smtt::dispatch(expr, inst)};
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    json out = schedule_json("expr", inst, sched, elapsed);
    out["expression"] = expr.str();
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  if (method == "dp") {
    const auto t0 = clock::now();
    const smtt::DpResult res = smtt::dp_optimal(inst, dp_cap);
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    std::cout << schedule_json("dp", inst, res.schedule, elapsed).dump(2) << "\n";
    return 0;
  }
  if (method == "brute") {
    const auto t0 = clock::now();
    const smtt::BruteForceResult res = smtt::brute_force_optimal(inst);
    const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    std::cout << schedule_json("brute", inst, res.schedule, elapsed).dump(2) << "\n";
    return 0;
  }
  const smtt::HeuristicRun run =
      smtt::run_heuristic(smtt::heuristic_from_name(method), inst);
  std::cout << schedule_json(method, inst, run.schedule, run.elapsed_seconds).dump(2)
            << "\n";
  return 0;
}

int cmd_bench(const std::string& data_dir, std::vector<std::string> methods,
              const std::string& oracle_name, const std::string& optima_path,
              int dp_cap, const std::string& out_path,
              const std::string& records_path) {
  const smtt::Dataset ds = smtt::load_dataset(data_dir);
  if (methods.empty())
    for (const auto id : smtt::all_heuristics())
      methods.push_back(smtt::heuristic_name(id));

  smtt::OracleKind oracle = smtt::OracleKind::Dp;
  smtt::ProvidedOptima optima;
  const smtt::ProvidedOptima* optima_ptr = nullptr;
  if (oracle_name == "brute") {
    oracle = smtt::OracleKind::BruteForce;
  } else if (oracle_name == "file") {
    oracle = smtt::OracleKind::ProvidedOptima;
    optima = smtt::load_provided_optima(optima_path);
    optima_ptr = &optima;
  }

  const auto records =
      smtt::run_suite(ds, methods, oracle, optima_ptr, nullptr, dp_cap);
  const smtt::GapTable table = smtt::aggregate(records);
  const std::string csv = smtt::gap_table_csv(table);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    smtt::emit_csv(table, out_path);
    std::cout << "wrote gap table to " << out_path << "\n";
  }
  if (!records_path.empty()) {
    smtt::emit_records_csv(records, records_path);
    std::cout << "wrote per-run records to " << records_path << "\n";
  }
  return 0;
}

int cmd_export_lp(const std::string& instance_path, const std::string& out_path,
                  bool with_vi) {
  const smtt::Instance inst = smtt::read_instance(instance_path);
  const smtt::MipModel model = smtt::build_mip(inst, with_vi);
  const std::string lp = smtt::export_lp(model);
  if (out_path.empty()) {
    std::cout << lp;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return kExitDomain;
  }
  out << lp;
  std::cout << "wrote " << model.rows.size() << " rows to " << out_path << "\n";
  return 0;
}

void apply_config_file(smtt::DiscoveryConfig& cfg, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  if (j.contains("islands")) cfg.islands = j["islands"].get<int>();
  if (j.contains("sample_k")) cfg.sample_k = j["sample_k"].get<int>();
  if (j.contains("reset_period_seconds"))
    cfg.reset_period_seconds = j["reset_period_seconds"].get<double>();
  if (j.contains("reset_period_iterations"))
    cfg.reset_period_iterations = j["reset_period_iterations"].get<std::int64_t>();
  if (j.contains("max_iterations"))
    cfg.max_iterations = j["max_iterations"].get<std::int64_t>();
  if (j.contains("wall_clock_limit_seconds"))
    cfg.wall_clock_limit_seconds = j["wall_clock_limit_seconds"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("max_expr_depth")) cfg.max_expr_depth = j["max_expr_depth"].get<int>();
  if (j.contains("initial_expression"))
    cfg.initial_expression = j["initial_expression"].get<std::string>();
  if (j.contains("log_path")) cfg.log_path = j["log_path"].get<std::string>();
  if (j.contains("training")) {
    const json& t = j["training"];
    if (t.contains("n")) cfg.training.n = t["n"].get<int>();
    if (t.contains("per_class")) cfg.training.per_class = t["per_class"].get<int>();
    if (t.contains("seed")) cfg.training.seed = t["seed"].get<std::uint64_t>();
    if (t.contains("dist"))
      cfg.training.dist = smtt::distribution_from_name(t["dist"].get<std::string>());
  }
}

int cmd_discover(const std::string& config_path, bool full_scale,
                 const std::string& mutator_name, const std::string& url,
                 const std::string& token_env,
                 std::optional<std::uint64_t> seed_override,
                 std::optional<std::int64_t> iter_override,
                 const std::string& log_path, const std::string& out_path) {
  smtt::DiscoveryConfig cfg =
      full_scale ? smtt::DiscoveryConfig{} : smtt::DiscoveryConfig::desk();
  if (!config_path.empty()) apply_config_file(cfg, config_path);
  if (seed_override) cfg.seed = *seed_override;
  if (iter_override) cfg.max_iterations = *iter_override;
  if (!log_path.empty()) cfg.log_path = log_path;

  std::unique_ptr<smtt::Mutator> mutator;
  if (mutator_name == "http") {
    smtt::HttpMutatorConfig hcfg;
    hcfg.url = url;
    if (!token_env.empty()) hcfg.token_env = token_env;
    mutator = std::make_unique<smtt::HttpMutator>(hcfg, &std::cerr);
  } else {
    mutator = std::make_unique<smtt::StubMutator>(cfg.seed, cfg.max_expr_depth);
  }

  const smtt::DiscoveryResult res = smtt::run_discovery(cfg, *mutator);
  json out;
  out["expression"] = res.best.expr.str();
  out["score"] = res.best.score;
  out["island"] = res.best.island;
  out["iteration"] = res.best.iteration;
  out["iterations_run"] = res.iterations_run;
  out["resets"] = res.reset_iterations;
  const std::string text = out.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(out_path, std::ios::binary);
    if (!o) {
      std::cerr << "error: cannot open " << out_path << " for writing\n";
      return kExitDomain;
    }
    o << text;
    std::cout << "wrote discovery result to " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-machine total tardiness toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset");
  std::string gen_out;
  int gen_n = 20, gen_per_class = 10;
  std::uint64_t gen_seed = 42;
  std::string gen_dist = "uniform", gen_grid = "test";
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--n", gen_n, "Jobs per instance")->check(CLI::PositiveNumber);
  gen->add_option("--per-class", gen_per_class, "Instances per parameter class")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Master seed");
  gen->add_option("--dist", gen_dist, "Processing-time distribution")
      ->check(CLI::IsMember({"uniform", "normal"}));
  gen->add_option("--grid", gen_grid, "Parameter grid")
      ->check(CLI::IsMember({"test", "training"}));

  // solve
  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  std::string solve_instance, solve_method = "mddc", solve_expr;
  int solve_dp_cap = smtt::kDefaultDpCap;
  solve->add_option("instance", solve_instance, "Instance file")->required();
  solve->add_option("--method", solve_method,
                    "Heuristic name, or 'dp'/'brute' for exact solving");
  solve->add_option("--expr", solve_expr,
                    "Priority expression to dispatch with (overrides --method)");
  solve->add_option("--dp-cap", solve_dp_cap, "Job-count cap for the DP solver");

  // bench
  auto* bench = app.add_subcommand("bench", "Run heuristics against an oracle");
  std::string bench_data, bench_oracle = "dp", bench_optima, bench_out,
              bench_records;
  std::vector<std::string> bench_methods;
  int bench_dp_cap = smtt::kDefaultDpCap;
  bench->add_option("--data", bench_data, "Dataset directory (with manifest.csv)")
      ->required();
  bench->add_option("--methods", bench_methods,
                    "Heuristics to run (default: all built-ins)")
      ->delimiter(',');
  bench->add_option("--oracle", bench_oracle, "Optimum source")
      ->check(CLI::IsMember({"dp", "brute", "file"}));
  bench->add_option("--optima", bench_optima,
                    "CSV of instance_path,optimal (for --oracle file)");
  bench->add_option("--dp-cap", bench_dp_cap, "Job-count cap for the DP oracle");
  bench->add_option("--out", bench_out, "Gap table CSV path (default: stdout)");
  bench->add_option("--records", bench_records, "Per-run records CSV path");

  // export-lp
  auto* lp = app.add_subcommand("export-lp", "Write an LP-format model");
  std::string lp_instance, lp_out;
  bool lp_vi = false;
  lp->add_option("instance", lp_instance, "Instance file")->required();
  lp->add_option("--out", lp_out, "Output path (default: stdout)");
  lp->add_flag("--vi", lp_vi,
               "Add completion-time lower-bound rows (reindexes jobs by "
               "nonincreasing processing time)");

  // discover
  auto* disc = app.add_subcommand("discover", "Search for a priority rule");
  std::string disc_config, disc_mutator = "stub", disc_url, disc_token_env,
              disc_log, disc_out;
  bool disc_full_scale = false;
  std::optional<std::uint64_t> disc_seed;
  std::optional<std::int64_t> disc_iters;
  disc->add_option("--config", disc_config, "JSON configuration file");
  disc->add_flag("--full-scale", disc_full_scale,
                 "Start from the large default configuration instead of the "
                 "desk-sized one");
  disc->add_option("--mutator", disc_mutator, "Candidate source")
      ->check(CLI::IsMember({"stub", "http"}));
  disc->add_option("--url", disc_url, "Mutation service URL (for --mutator http)");
  disc->add_option("--token-env", disc_token_env,
                   "Environment variable holding the bearer token "
                   "(default SMTT_MUTATOR_TOKEN; the value is never printed)");
  disc->add_option("--seed", disc_seed, "Override the search seed");
  disc->add_option("--iterations", disc_iters, "Override max iterations");
  disc->add_option("--log", disc_log, "Iteration log CSV path");
  disc->add_option("--out", disc_out, "Result JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse the library's per-error exit codes onto the documented
    // contract: 0 for --help/--version, 2 for any usage error.
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_out, gen_n, gen_per_class, gen_seed, gen_dist, gen_grid);
    if (solve->parsed()) {
      if (solve_expr.empty() && solve_method != "dp" && solve_method != "brute") {
        try {
          smtt::heuristic_from_name(solve_method);
        } catch (const std::exception& e) {
          std::cerr << "error: " << e.what() << "\n";
          return kExitUsage;
        }
      }
      return cmd_solve(solve_instance, solve_method, solve_expr, solve_dp_cap);
    }
    if (bench->parsed()) {
      if (bench_oracle == "file" && bench_optima.empty()) {
        std::cerr << "error: --oracle file requires --optima\n";
        return kExitUsage;
      }
      for (const auto& m : bench_methods) {
        try {
          smtt::heuristic_from_name(m);
        } catch (const std::exception& e) {
          std::cerr << "error: " << e.what() << "\n";
          return kExitUsage;
        }
      }
      return cmd_bench(bench_data, bench_methods, bench_oracle, bench_optima,
                       bench_dp_cap, bench_out, bench_records);
    }
    if (lp->parsed()) return cmd_export_lp(lp_instance, lp_out, lp_vi);
    if (disc->parsed()) {
      if (disc_mutator == "http" && disc_url.empty()) {
        std::cerr << "error: --mutator http requires --url\n";
        return kExitUsage;
      }
      return cmd_discover(disc_config, disc_full_scale, disc_mutator, disc_url,
                          disc_token_env, disc_seed, disc_iters, disc_log,
                          disc_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return 0;
}
