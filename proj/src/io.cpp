#include "gsopt/io.hpp"

#include <bit>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary vector files are little-endian; big-endian hosts need byte swaps");

namespace gsopt::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_doubles(const std::string& path, const double* data, size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
  if (!out) throw std::runtime_error("short write: " + path);
}

std::vector<double> read_doubles(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  const std::streamsize bytes = in.tellg();
  if (bytes % 8 != 0) throw std::runtime_error("file size is not a multiple of 8: " + path);
  std::vector<double> data(static_cast<size_t>(bytes / 8));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), bytes);
  if (!in) throw std::runtime_error("short read: " + path);
  return data;
}

std::string sibling(const std::string& manifest_path, const std::string& name) {
  return (fs::path(manifest_path).parent_path() / name).string();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::invalid_argument("unknown key in " + what + ": " + it.key());
    }
  }
}

RParam r_from_json(const json& j) {
  if (j.is_string()) return RParam::parse(j.get<std::string>());
  return RParam::finite(j.get<double>());
}

json r_to_json(const RParam& r) {
  if (r.is_inf()) return json("inf");
  return json(r.value());
}

}  // namespace

void write_vector_f64(const std::string& path, const Eigen::VectorXd& v) {
  write_doubles(path, v.data(), static_cast<size_t>(v.size()));
}

Eigen::VectorXd read_vector_f64(const std::string& path) {
  const std::vector<double> data = read_doubles(path);
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

void write_matrix_f64(const std::string& path, const Eigen::MatrixXd& A) {
  // Eigen's default storage is already column-major.
  write_doubles(path, A.data(), static_cast<size_t>(A.size()));
}

Eigen::MatrixXd read_matrix_f64(const std::string& path, int rows, int cols) {
  const std::vector<double> data = read_doubles(path);
  if (data.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    throw std::runtime_error("matrix file size does not match dimensions: " + path);
  }
  return Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

void write_problem(const std::string& manifest_path, const ProblemSpec& problem,
                   const GroupedVector* x_or) {
  problem.validate();
  const fs::path base = fs::path(manifest_path);
  const std::string stem = base.stem().string();
  const std::string a_file = stem + "_A.bin";
  const std::string y_file = stem + "_y.bin";

  json j;
  j["M"] = problem.A.rows();
  j["N"] = problem.A.cols();
  j["group_sizes"] = problem.partition->group_sizes();
  j["alpha"] = problem.alpha;
  j["p"] = problem.p;
  j["q"] = problem.q;
  j["r"] = r_to_json(problem.r);
  j["A_file"] = a_file;
  j["y_file"] = y_file;

  write_matrix_f64(sibling(manifest_path, a_file), problem.A);
  write_vector_f64(sibling(manifest_path, y_file), problem.y);
  if (x_or != nullptr) {
    const std::string x_file = stem + "_xor.bin";
    j["x_or_file"] = x_file;
    write_vector_f64(sibling(manifest_path, x_file), x_or->values);
  }
  write_json_file(manifest_path, j);
}

ProblemFiles read_problem(const std::string& manifest_path) {
  const json j = load_json_file(manifest_path);
  reject_unknown_keys(
      j, {"M", "N", "group_sizes", "alpha", "p", "q", "r", "A_file", "y_file", "x_or_file"},
      "problem manifest");

  const int M = j.at("M").get<int>();
  const int N = j.at("N").get<int>();
  ProblemSpec problem;
  problem.partition = std::make_shared<const GroupPartition>(
      j.at("group_sizes").get<std::vector<int>>());
  problem.alpha = j.at("alpha").get<double>();
  problem.p = j.at("p").get<double>();
  problem.q = j.at("q").get<double>();
  problem.r = r_from_json(j.at("r"));
  problem.A = read_matrix_f64(sibling(manifest_path, j.at("A_file").get<std::string>()), M, N);
  problem.y = read_vector_f64(sibling(manifest_path, j.at("y_file").get<std::string>()));
  problem.validate();

  ProblemFiles out{std::move(problem), std::nullopt};
  if (j.contains("x_or_file")) {
    Eigen::VectorXd xv =
        read_vector_f64(sibling(manifest_path, j.at("x_or_file").get<std::string>()));
    out.x_or = GroupedVector(std::move(xv), out.problem.partition);
  }
  return out;
}

json run_record_to_json(const issapl::RunRecord& record) {
  json iters = json::array();
  for (const auto& it : record.iters) {
    iters.push_back({{"iter", it.iter},
                     {"objective", it.objective},
                     {"support_size", it.support_size},
                     {"step_norm", it.step_norm},
                     {"u_norm", it.u_norm},
                     {"u_bound", it.u_bound},
                     {"cert_satisfied", it.cert_satisfied},
                     {"min_group_norm", it.min_group_norm},
                     {"inner_iterations", it.inner_iterations},
                     {"tighten_rounds", it.tighten_rounds},
                     {"factorizations", it.factorizations},
                     {"inner_converged", it.inner_converged},
                     {"wall_seconds", it.wall_seconds}});
  }
  return json{{"initial_objective", record.initial_objective},
              {"converged", record.converged},
              {"total_seconds", record.total_seconds},
              {"iterations", iters}};
}

void write_solution(const std::string& sidecar_path, const GroupedVector& x,
                    const issapl::RunRecord& record) {
  const fs::path base = fs::path(sidecar_path);
  const std::string x_file = base.stem().string() + "_x.bin";
  write_vector_f64(sibling(sidecar_path, x_file), x.values);

  json j;
  j["N"] = x.values.size();
  j["group_sizes"] = x.partition->group_sizes();
  j["format"] = "float64-le";
  j["x_file"] = x_file;
  j["run_record"] = run_record_to_json(record);
  write_json_file(sidecar_path, j);
}

GroupedVector read_solution(const std::string& sidecar_path) {
  const json j = load_json_file(sidecar_path);
  auto partition = std::make_shared<const GroupPartition>(
      j.at("group_sizes").get<std::vector<int>>());
  Eigen::VectorXd xv =
      read_vector_f64(sibling(sidecar_path, j.at("x_file").get<std::string>()));
  return GroupedVector(std::move(xv), partition);
}

issapl::SolverConfig config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"p", "q", "r", "beta", "epsilon", "rho1", "rho2", "outer_tol", "max_outer",
                       "eps_abs", "eps_rel", "max_inner", "zero_tol", "init", "tighten_rounds"},
                      "solver config");
  issapl::SolverConfig c;
  if (j.contains("p")) c.p = j.at("p").get<double>();
  if (j.contains("q")) c.q = j.at("q").get<double>();
  if (j.contains("r")) c.r = r_from_json(j.at("r"));
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("rho1")) c.rho1 = j.at("rho1").get<double>();
  if (j.contains("rho2")) c.rho2 = j.at("rho2").get<double>();
  if (j.contains("outer_tol")) c.outer_tol = j.at("outer_tol").get<double>();
  if (j.contains("max_outer")) c.max_outer = j.at("max_outer").get<int>();
  if (j.contains("eps_abs")) c.eps_abs = j.at("eps_abs").get<double>();
  if (j.contains("eps_rel")) c.eps_rel = j.at("eps_rel").get<double>();
  if (j.contains("max_inner")) c.max_inner = j.at("max_inner").get<int>();
  if (j.contains("zero_tol")) c.zero_tol = j.at("zero_tol").get<double>();
  if (j.contains("tighten_rounds")) c.tighten_rounds = j.at("tighten_rounds").get<int>();
  if (j.contains("init")) {
    const json& ji = j.at("init");
    reject_unknown_keys(ji, {"kind", "c", "seed"}, "init spec");
    const std::string kind = ji.at("kind").get<std::string>();
    if (kind == "ones") {
      c.init.kind = issapl::InitSpec::Kind::kOnes;
      if (ji.contains("c")) c.init.c = ji.at("c").get<double>();
    } else if (kind == "gaussian") {
      c.init.kind = issapl::InitSpec::Kind::kGaussian;
      if (ji.contains("seed")) c.init.seed = ji.at("seed").get<std::uint64_t>();
    } else {
      throw std::invalid_argument("unknown init kind: " + kind);
    }
  }
  c.validate();
  return c;
}

json config_to_json(const issapl::SolverConfig& c) {
  json init;
  if (c.init.kind == issapl::InitSpec::Kind::kOnes) {
    init = json{{"kind", "ones"}, {"c", c.init.c}};
  } else {
    init = json{{"kind", "gaussian"}, {"seed", c.init.seed}};
  }
  return json{{"p", c.p},
              {"q", c.q},
              {"r", r_to_json(c.r)},
              {"beta", c.beta},
              {"epsilon", c.epsilon},
              {"rho1", c.rho1},
              {"rho2", c.rho2},
              {"outer_tol", c.outer_tol},
              {"max_outer", c.max_outer},
              {"eps_abs", c.eps_abs},
              {"eps_rel", c.eps_rel},
              {"max_inner", c.max_inner},
              {"zero_tol", c.zero_tol},
              {"tighten_rounds", c.tighten_rounds},
              {"init", init}};
}

}  // namespace gsopt::io
