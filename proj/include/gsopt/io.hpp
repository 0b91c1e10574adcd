#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include <json.hpp>

#include "gsopt/issapl.hpp"
#include "gsopt/model.hpp"

namespace gsopt::io {

// Raw little-endian float64 vector/matrix files. Matrices are column-major.
void write_vector_f64(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_f64(const std::string& path);
void write_matrix_f64(const std::string& path, const Eigen::MatrixXd& A);
Eigen::MatrixXd read_matrix_f64(const std::string& path, int rows, int cols);

struct ProblemFiles {
  ProblemSpec problem;
  std::optional<GroupedVector> x_or;  // present when the manifest names a ground truth
};

// Manifest schema:
//   {"M", "N", "group_sizes", "alpha", "p", "q", "r", "A_file", "y_file"}
// with "r" either a number or "inf", binary paths relative to the manifest,
// and an optional "x_or_file".
void write_problem(const std::string& manifest_path, const ProblemSpec& problem,
                   const GroupedVector* x_or);
ProblemFiles read_problem(const std::string& manifest_path);

// Solution vector in the same binary layout plus a JSON sidecar with the
// per-iteration telemetry.
void write_solution(const std::string& sidecar_path, const GroupedVector& x,
                    const issapl::RunRecord& record);
GroupedVector read_solution(const std::string& sidecar_path);

nlohmann::json run_record_to_json(const issapl::RunRecord& record);

// SolverConfig <-> JSON ("r": "inf" accepted; "init": {"kind": "ones"|"gaussian",
// "c": ..., "seed": ...}). Unknown keys are rejected.
issapl::SolverConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const issapl::SolverConfig& config);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace gsopt::io
