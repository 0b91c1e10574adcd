#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gsopt/datagen.hpp"
#include "gsopt/issapl.hpp"
#include "gsopt/model.hpp"

namespace gsopt::bench {

// ||x - x_or||_2 / ||x_or||_2. Throws when the ground truth is zero.
double relative_error(const GroupedVector& x, const GroupedVector& x_or);

enum class SweepAxis { kS, kN, kQ, kR, kAlpha, kSigma };

std::string sweep_axis_str(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& s);

using SweepValue = std::variant<double, RParam>;  // RParam only for the r axis

std::string sweep_value_str(const SweepValue& v);

struct ExperimentPlan {
  datagen::GenSpec gen;  // template; the sweep axis overrides one field
  double alpha = 1.0;
  std::map<std::string, double> alpha_by_r;  // optional per-r override ("1", "2", "inf")
  issapl::SolverConfig solver;
  SweepAxis axis = SweepAxis::kS;
  std::vector<SweepValue> values;
  int trials = 50;
  double success_threshold = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialOutcome {
  double rel_err = 0.0;
  bool success = false;
  double seconds = 0.0;
  int outer_iters = 0;
  int support_size = 0;
  bool ok = true;  // per-trial solver issues are recorded, not fatal
  std::string error;
};

struct ResultRow {
  std::string sweep;  // sweep point label
  double rel_err_mean = 0.0;
  double success_rate = 0.0;
  double time_mean_s = 0.0;
  double outer_iters_mean = 0.0;
  double support_mean = 0.0;
  std::vector<TrialOutcome> trials;  // retained for diagnostics; not emitted in CSV
};

// Runs `trials` independent instances per sweep point with pre-assigned
// derived seeds; everything except measured wall time is a pure function of
// (plan, threads is irrelevant).
std::vector<ResultRow> run_experiment(const ExperimentPlan& plan, int threads = 1);

// CSV columns: sweep,rel_err_mean,success_rate,time_mean_s,outer_iters_mean,support_mean
void emit_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_results_json(const std::vector<ResultRow>& rows, std::ostream& out);

ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);

// Derived per-trial seed, fixed before dispatch so results are independent of
// scheduling.
std::uint64_t trial_seed(std::uint64_t plan_seed, int sweep_index, int trial_index);

// Resolves the fidelity weight for a sweep point (alpha_by_r beats alpha when
// the instance's r has an entry).
double alpha_for(const ExperimentPlan& plan, const RParam& r);

}  // namespace gsopt::bench
