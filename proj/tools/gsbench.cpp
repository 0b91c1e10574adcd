// gsbench: problem generation, single solves, experiment sweeps, and
// oracle verification for the group-sparse recovery solver.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gsopt/bench.hpp"
#include "gsopt/datagen.hpp"
#include "gsopt/io.hpp"
#include "gsopt/issapl.hpp"
#include "gsopt/model.hpp"
#include "gsopt/verify.hpp"

namespace {

using namespace gsopt;

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_rows(const std::vector<bench::ResultRow>& rows, const std::string& out_path,
                const std::string& format) {
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  if (format == "json") {
    bench::emit_results_json(rows, out);
  } else {
    bench::emit_results_csv(rows, out);
  }
}

std::string format_from(const std::string& requested, const std::string& path) {
  if (!requested.empty()) return requested;
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? "json" : "csv";
}

// ---------------------------------------------------------------------------
// Pinned experiment presets. The same plans are committed under presets/ for
// use with the `experiment` subcommand; keep both in sync (tests check this).

issapl::SolverConfig preset_solver(double p, double q, const RParam& r) {
  issapl::SolverConfig solver;
  solver.p = p;
  solver.q = q;
  solver.r = r;
  return solver;
}

bench::ExperimentPlan table1_plan() {
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{256, 1024, 8, 8, 0.001, datagen::NoiseKind::kGaussian, 0};
  plan.alpha = 0.005;
  plan.solver = preset_solver(2.0, 0.5, RParam::finite(2.0));
  plan.axis = bench::SweepAxis::kS;
  plan.values = {8.0, 16.0};
  plan.trials = 10;
  plan.seed = 1;
  return plan;
}

std::map<std::string, double> compare_r_alphas() {
  return {{"1", 0.5}, {"2", 0.01}, {"inf", 0.005}};
}

bench::ExperimentPlan compare_r_plan(datagen::NoiseKind noise, const RParam& r) {
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{256, 1024, 4, 4, 0.01, noise, 0};
  plan.alpha_by_r = compare_r_alphas();
  plan.alpha = bench::alpha_for(plan, r);  // resolved per r; base field unused here
  plan.solver = preset_solver(2.0, 0.5, r);
  plan.axis = bench::SweepAxis::kS;
  plan.values = {4.0, 8.0, 12.0, 16.0};
  plan.trials = 10;
  plan.seed = 2;
  return plan;
}

bench::ExperimentPlan table3_plan(bool large) {
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{256, 1024, 8, 4, 0.001, datagen::NoiseKind::kGaussian, 0};
  plan.alpha = 0.005;
  plan.solver = preset_solver(2.0, 0.5, RParam::finite(2.0));
  plan.axis = bench::SweepAxis::kS;
  plan.values = {4.0, 8.0, 12.0, 16.0};
  plan.trials = 5;
  plan.seed = 3;
  if (large) {
    plan.gen.M = 1024;
    plan.gen.N = 4096;
    plan.values = {25.0, 50.0, 75.0, 100.0};
    plan.trials = 3;
  }
  return plan;
}

// ---------------------------------------------------------------------------

int cmd_gen(const std::string& out, int M, int N, int n, int s, double sigma,
            const std::string& noise, std::uint64_t seed, double alpha, double p, double q,
            const std::string& r_str) {
  datagen::GenSpec spec{M, N, n, s, sigma, datagen::parse_noise_kind(noise), seed};
  const RParam r = RParam::parse(r_str);
  const datagen::GeneratedProblem inst = datagen::gen_problem(spec, alpha, p, q, r);
  io::write_problem(out, inst.problem, &inst.x_or);
  std::cout << "wrote " << out << " (M=" << M << ", N=" << N << ", groups=" << N / n
            << ", s=" << s << ")\n";
  return 0;
}

int cmd_solve(const std::string& manifest, const std::string& config_path,
              const std::string& out) {
  const io::ProblemFiles files = io::read_problem(manifest);

  issapl::SolverConfig config;
  if (!config_path.empty()) {
    nlohmann::json j = io::load_json_file(config_path);
    // p, q, r belong to the instance; fill them in before parsing so a
    // config file may omit them.
    if (!j.contains("p")) j["p"] = files.problem.p;
    if (!j.contains("q")) j["q"] = files.problem.q;
    if (!j.contains("r")) {
      j["r"] = files.problem.r.is_inf() ? nlohmann::json("inf")
                                        : nlohmann::json(files.problem.r.value());
    }
    config = io::config_from_json(j);
  } else {
    config.p = files.problem.p;
    config.q = files.problem.q;
    config.r = files.problem.r;
  }

  const issapl::SolveResult res = issapl::solve(files.problem, config);
  io::write_solution(out, res.x, res.record);

  const SupportSet support = group_support(res.x, config.zero_tol);
  std::cout << "objective " << objective(files.problem, res.x) << ", support "
            << support.size() << " groups, " << res.record.iters.size() << " outer iterations, "
            << res.record.total_seconds << " s\n";
  if (files.x_or) {
    std::cout << "relative error vs ground truth: "
              << bench::relative_error(res.x, *files.x_or) << "\n";
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_experiment(const std::string& plan_path, std::uint64_t seed, bool seed_set, int threads,
                   const std::string& out, const std::string& format) {
  bench::ExperimentPlan plan = bench::plan_from_json(io::load_json_file(plan_path));
  if (seed_set) plan.seed = seed;
  const std::vector<bench::ResultRow> rows = bench::run_experiment(plan, threads);
  write_rows(rows, out, format_from(format, out));
  bench::emit_results_csv(rows, std::cout);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, int count) {
  const auto results = verify::run_prox_suites(seed, count);
  for (const auto& r : results) {
    std::printf("%-32s %5d instances  max dev %.3e  [%s]\n", r.name.c_str(), r.count,
                r.max_abs_dev, r.pass ? "ok" : "FAIL");
  }
  return verify::all_pass(results) ? 0 : 1;
}

int cmd_table1(std::uint64_t seed, bool seed_set, int threads, const std::string& out,
               const std::string& format) {
  bench::ExperimentPlan plan = table1_plan();
  if (seed_set) plan.seed = seed;
  const auto rows = bench::run_experiment(plan, threads);
  bench::emit_results_csv(rows, std::cout);
  if (!out.empty()) {
    write_rows(rows, out, format_from(format, out));
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_compare_r(std::uint64_t seed, bool seed_set, int threads, int trials,
                  const std::string& out, const std::string& format) {
  const std::vector<datagen::NoiseKind> noises{datagen::NoiseKind::kLaplace,
                                               datagen::NoiseKind::kGaussian,
                                               datagen::NoiseKind::kUniform};
  const std::vector<RParam> rs{RParam::finite(1.0), RParam::finite(2.0), RParam::inf()};

  // rows keyed (noise, r): each an s-sweep.
  std::vector<bench::ResultRow> combined;
  std::map<std::string, std::map<std::string, std::vector<double>>> errs;  // noise -> r -> per-s
  std::vector<double> s_values;
  for (const auto noise : noises) {
    for (const auto& r : rs) {
      bench::ExperimentPlan plan = compare_r_plan(noise, r);
      if (seed_set) plan.seed = seed;
      if (trials > 0) plan.trials = trials;
      const auto rows = bench::run_experiment(plan, threads);
      const std::string noise_name = datagen::noise_kind_str(noise);
      auto& per_r = errs[noise_name][r.str()];
      s_values.clear();
      for (const auto& row : rows) {
        bench::ResultRow labeled = row;
        labeled.sweep = noise_name + ":r" + r.str() + ":s" + row.sweep;
        labeled.trials.clear();
        combined.push_back(std::move(labeled));
        per_r.push_back(row.rel_err_mean);
        s_values.push_back(std::stod(row.sweep));
      }
    }
  }

  // Winner summary: the r matched to each noise should give the smallest
  // mean relative error cell by cell.
  const std::map<std::string, std::string> matched{{"laplace", "1"},
                                                   {"gaussian", "2"},
                                                   {"uniform", "inf"}};
  int matched_wins = 0;
  int cells = 0;
  std::cout << "noise,s,best_r,matched_r,matched_win\n";
  for (const auto& [noise_name, by_r] : errs) {
    const size_t points = by_r.begin()->second.size();
    for (size_t si = 0; si < points; ++si) {
      std::string best_r;
      double best = 0.0;
      for (const auto& [r_name, vals] : by_r) {
        if (best_r.empty() || vals[si] < best) {
          best = vals[si];
          best_r = r_name;
        }
      }
      const bool win = best_r == matched.at(noise_name);
      matched_wins += win ? 1 : 0;
      ++cells;
      std::cout << noise_name << ',' << s_values[si] << ',' << best_r << ','
                << matched.at(noise_name) << ',' << (win ? "yes" : "no") << "\n";
    }
  }
  std::cout << "matched r wins " << matched_wins << " of " << cells << " cells\n";

  if (!out.empty()) {
    write_rows(combined, out, format_from(format, out));
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_table3(std::uint64_t seed, bool seed_set, int threads, bool large,
               const std::string& out, const std::string& format) {
  bench::ExperimentPlan plan = table3_plan(large);
  if (seed_set) plan.seed = seed;
  const auto rows = bench::run_experiment(plan, threads);
  bench::emit_results_csv(rows, std::cout);
  if (!out.empty()) {
    write_rows(rows, out, format_from(format, out));
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-sparse lpq-lr recovery benchmark"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = default_threads();
  std::string out;
  std::string format;
  int count = 1000;
  int trials = 0;
  bool large = false;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic problem and write its files");
  int gM = 256, gN = 1024, gn = 8, gs = 8;
  double gsigma = 0.001, galpha = 0.003, gp = 2.0, gq = 0.5;
  std::string gnoise = "gaussian", gr = "2";
  std::string gen_out = "problem.json";
  gen->add_option("--M", gM, "measurement count");
  gen->add_option("--N", gN, "signal length");
  gen->add_option("--group-size", gn, "uniform group size n");
  gen->add_option("--s", gs, "number of nonzero groups");
  gen->add_option("--sigma", gsigma, "noise level");
  gen->add_option("--noise", gnoise, "gaussian | laplace | uniform");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--alpha", galpha, "fidelity weight");
  gen->add_option("--p", gp, "group norm exponent");
  gen->add_option("--q", gq, "regularizer power");
  gen->add_option("--r", gr, "fidelity exponent (number or 'inf')");
  gen->add_option("--out", gen_out, "manifest path");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a problem file");
  std::string manifest, config_path;
  std::string solve_out = "solution.json";
  solve->add_option("problem", manifest, "problem manifest (JSON)")->required();
  solve->add_option("--config", config_path, "solver config (JSON)");
  solve->add_option("--out", solve_out, "solution sidecar path");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run an experiment plan");
  std::string plan_path;
  std::string exp_out = "results.csv";
  experiment->add_option("plan", plan_path, "experiment plan (JSON)")->required();
  auto* exp_seed = experiment->add_option("--seed", seed, "override the plan seed");
  experiment->add_option("--threads", threads, "worker threads");
  experiment->add_option("--out", exp_out, "results path");
  experiment->add_option("--format", format, "csv | json (default: by extension)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the prox oracle suites");
  verify_cmd->add_option("--seed", seed, "RNG seed");
  verify_cmd->add_option("--count", count, "instances per suite");

  // presets
  auto* table1 = app.add_subcommand("table1", "noise-level preset: s in {8,16}, r=2");
  auto* t1_seed = table1->add_option("--seed", seed, "override the preset seed");
  table1->add_option("--threads", threads, "worker threads");
  table1->add_option("--out", out, "results path");
  table1->add_option("--format", format, "csv | json");

  auto* comparer = app.add_subcommand("compare-r", "fidelity-vs-noise preset (r in {1,2,inf})");
  auto* cr_seed = comparer->add_option("--seed", seed, "override the preset seed");
  comparer->add_option("--threads", threads, "worker threads");
  comparer->add_option("--trials", trials, "trials per sweep point");
  comparer->add_option("--out", out, "results path");
  comparer->add_option("--format", format, "csv | json");

  auto* table3 = app.add_subcommand("table3-self", "timing/error preset (own solver only)");
  auto* t3_seed = table3->add_option("--seed", seed, "override the preset seed");
  table3->add_option("--threads", threads, "worker threads");
  table3->add_flag("--large", large, "use the M=1024, N=4096 block");
  table3->add_option("--out", out, "results path");
  table3->add_option("--format", format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // unknown subcommand/flag
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_out, gM, gN, gn, gs, gsigma, gnoise, seed, galpha, gp, gq, gr);
    }
    if (solve->parsed()) return cmd_solve(manifest, config_path, solve_out);
    if (experiment->parsed()) {
      return cmd_experiment(plan_path, seed, exp_seed->count() > 0, threads, exp_out, format);
    }
    if (verify_cmd->parsed()) return cmd_verify(seed, count);
    if (table1->parsed()) {
      return cmd_table1(seed, t1_seed->count() > 0, threads, out, format);
    }
    if (comparer->parsed()) {
      return cmd_compare_r(seed, cr_seed->count() > 0, threads, trials, out, format);
    }
    if (table3->parsed()) {
      return cmd_table3(seed, t3_seed->count() > 0, threads, large, out, format);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
