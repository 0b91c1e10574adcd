#include "gsopt/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "gsopt/io.hpp"
#include "gsopt/rng.hpp"

namespace gsopt::bench {

using nlohmann::json;

double relative_error(const GroupedVector& x, const GroupedVector& x_or) {
  const double denom = x_or.values.norm();
  if (!(denom > 0.0)) throw std::invalid_argument("relative_error: zero ground truth");
  return (x.values - x_or.values).norm() / denom;
}

std::string sweep_axis_str(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kS: return "s";
    case SweepAxis::kN: return "n";
    case SweepAxis::kQ: return "q";
    case SweepAxis::kR: return "r";
    case SweepAxis::kAlpha: return "alpha";
    case SweepAxis::kSigma: return "sigma";
  }
  throw std::logic_error("unreachable");
}

SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "s") return SweepAxis::kS;
  if (s == "n") return SweepAxis::kN;
  if (s == "q") return SweepAxis::kQ;
  if (s == "r") return SweepAxis::kR;
  if (s == "alpha") return SweepAxis::kAlpha;
  if (s == "sigma") return SweepAxis::kSigma;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

std::string sweep_value_str(const SweepValue& v) {
  if (std::holds_alternative<RParam>(v)) return std::get<RParam>(v).str();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", std::get<double>(v));
  return buf;
}

void ExperimentPlan::validate() const {
  gen.validate();
  solver.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (values.empty()) throw std::invalid_argument("sweep must be nonempty");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("success threshold must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  for (const auto& v : values) {
    const bool is_r = std::holds_alternative<RParam>(v);
    if (is_r != (axis == SweepAxis::kR)) {
      throw std::invalid_argument("sweep values must match the axis type");
    }
  }
}

std::uint64_t trial_seed(std::uint64_t plan_seed, int sweep_index, int trial_index) {
  return rng::mix(rng::mix(plan_seed, 0xb111 + static_cast<std::uint64_t>(sweep_index)),
                  static_cast<std::uint64_t>(trial_index));
}

double alpha_for(const ExperimentPlan& plan, const RParam& r) {
  const auto it = plan.alpha_by_r.find(r.str());
  return it != plan.alpha_by_r.end() ? it->second : plan.alpha;
}

namespace {

// Instantiates the generator spec and solver config for one sweep point.
void apply_sweep_value(const ExperimentPlan& plan, const SweepValue& value,
                       datagen::GenSpec& gen, issapl::SolverConfig& solver, double& alpha) {
  switch (plan.axis) {
    case SweepAxis::kS:
      gen.s = static_cast<int>(std::lround(std::get<double>(value)));
      break;
    case SweepAxis::kN:
      gen.n = static_cast<int>(std::lround(std::get<double>(value)));
      break;
    case SweepAxis::kQ:
      solver.q = std::get<double>(value);
      break;
    case SweepAxis::kR:
      solver.r = std::get<RParam>(value);
      alpha = alpha_for(plan, solver.r);
      break;
    case SweepAxis::kAlpha:
      alpha = std::get<double>(value);
      break;
    case SweepAxis::kSigma:
      gen.sigma = std::get<double>(value);
      break;
  }
}

TrialOutcome run_trial(const datagen::GenSpec& gen, const issapl::SolverConfig& solver,
                       double alpha, double success_threshold) {
  TrialOutcome out;
  try {
    const datagen::GeneratedProblem inst =
        datagen::gen_problem(gen, alpha, solver.p, solver.q, solver.r);
    const issapl::SolveResult res = issapl::solve(inst.problem, solver);
    out.rel_err = relative_error(res.x, inst.x_or);
    out.success = out.rel_err < success_threshold;
    out.seconds = res.record.total_seconds;
    out.outer_iters = static_cast<int>(res.record.iters.size());
    out.support_size = res.record.iters.empty() ? 0 : res.record.iters.back().support_size;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentPlan& plan, int threads) {
  plan.validate();
  if (threads < 1) threads = 1;

  std::vector<ResultRow> rows;
  rows.reserve(plan.values.size());

  for (size_t pi = 0; pi < plan.values.size(); ++pi) {
    datagen::GenSpec gen = plan.gen;
    issapl::SolverConfig solver = plan.solver;
    double alpha = plan.alpha;
    apply_sweep_value(plan, plan.values[pi], gen, solver, alpha);
    gen.validate();

    std::vector<TrialOutcome> outcomes(static_cast<size_t>(plan.trials));
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int t = next.fetch_add(1); t < plan.trials; t = next.fetch_add(1)) {
        datagen::GenSpec trial_gen = gen;
        trial_gen.seed = trial_seed(plan.seed, static_cast<int>(pi), t);
        outcomes[static_cast<size_t>(t)] =
            run_trial(trial_gen, solver, alpha, plan.success_threshold);
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    // Aggregate in trial order; independent of scheduling.
    ResultRow row;
    row.sweep = sweep_value_str(plan.values[pi]);
    int ok_count = 0;
    for (const auto& o : outcomes) {
      if (!o.ok) continue;
      ++ok_count;
      row.rel_err_mean += o.rel_err;
      row.success_rate += o.success ? 1.0 : 0.0;
      row.time_mean_s += o.seconds;
      row.outer_iters_mean += o.outer_iters;
      row.support_mean += o.support_size;
    }
    if (ok_count > 0) {
      row.rel_err_mean /= ok_count;
      row.time_mean_s /= ok_count;
      row.outer_iters_mean /= ok_count;
      row.support_mean /= ok_count;
    }
    row.success_rate /= plan.trials;  // failed trials count as non-successes
    row.trials = std::move(outcomes);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}
}  // namespace

void emit_results_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("no rows to emit");
  out << "sweep,rel_err_mean,success_rate,time_mean_s,outer_iters_mean,support_mean\n";
  for (const auto& r : rows) {
    out << r.sweep << ',' << fmt(r.rel_err_mean) << ',' << fmt(r.success_rate) << ','
        << fmt(r.time_mean_s) << ',' << fmt(r.outer_iters_mean) << ',' << fmt(r.support_mean)
        << '\n';
  }
}

void emit_results_json(const std::vector<ResultRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("no rows to emit");
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"sweep", r.sweep},
                   {"rel_err_mean", r.rel_err_mean},
                   {"success_rate", r.success_rate},
                   {"time_mean_s", r.time_mean_s},
                   {"outer_iters_mean", r.outer_iters_mean},
                   {"support_mean", r.support_mean}});
  }
  out << arr.dump(2) << "\n";
}

ExperimentPlan plan_from_json(const json& j) {
  const std::set<std::string> known{"gen",    "alpha", "alpha_by_r",        "solver",
                                    "sweep",  "trials", "success_threshold", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::invalid_argument("unknown key in experiment plan: " + it.key());
    }
  }
  ExperimentPlan plan;
  const json& jg = j.at("gen");
  plan.gen.M = jg.at("M").get<int>();
  plan.gen.N = jg.at("N").get<int>();
  plan.gen.n = jg.at("n").get<int>();
  if (jg.contains("s")) plan.gen.s = jg.at("s").get<int>();
  if (jg.contains("sigma")) plan.gen.sigma = jg.at("sigma").get<double>();
  if (jg.contains("noise")) {
    plan.gen.noise = datagen::parse_noise_kind(jg.at("noise").get<std::string>());
  }

  plan.alpha = j.at("alpha").get<double>();
  if (j.contains("alpha_by_r")) {
    for (auto it = j.at("alpha_by_r").begin(); it != j.at("alpha_by_r").end(); ++it) {
      plan.alpha_by_r[it.key()] = it.value().get<double>();
    }
  }
  plan.solver = io::config_from_json(j.at("solver"));
  plan.axis = parse_sweep_axis(j.at("sweep").at("axis").get<std::string>());
  for (const json& v : j.at("sweep").at("values")) {
    if (plan.axis == SweepAxis::kR) {
      plan.values.push_back(v.is_string() ? RParam::parse(v.get<std::string>())
                                          : RParam::finite(v.get<double>()));
    } else {
      plan.values.push_back(v.get<double>());
    }
  }
  if (j.contains("trials")) plan.trials = j.at("trials").get<int>();
  if (j.contains("success_threshold")) {
    plan.success_threshold = j.at("success_threshold").get<double>();
  }
  if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
  plan.validate();
  return plan;
}

json plan_to_json(const ExperimentPlan& plan) {
  json values = json::array();
  for (const auto& v : plan.values) {
    if (std::holds_alternative<RParam>(v)) {
      const RParam& r = std::get<RParam>(v);
      if (r.is_inf()) {
        values.push_back("inf");
      } else {
        values.push_back(r.value());
      }
    } else {
      values.push_back(std::get<double>(v));
    }
  }
  json j{{"gen",
          {{"M", plan.gen.M},
           {"N", plan.gen.N},
           {"n", plan.gen.n},
           {"s", plan.gen.s},
           {"sigma", plan.gen.sigma},
           {"noise", datagen::noise_kind_str(plan.gen.noise)}}},
         {"alpha", plan.alpha},
         {"solver", io::config_to_json(plan.solver)},
         {"sweep", {{"axis", sweep_axis_str(plan.axis)}, {"values", values}}},
         {"trials", plan.trials},
         {"success_threshold", plan.success_threshold},
         {"seed", plan.seed}};
  if (!plan.alpha_by_r.empty()) {
    json by_r;
    for (const auto& [k, v] : plan.alpha_by_r) by_r[k] = v;
    j["alpha_by_r"] = by_r;
  }
  return j;
}

}  // namespace gsopt::bench
