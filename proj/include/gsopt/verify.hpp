#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Prox-vs-oracle verification suites shared by the `verify` CLI subcommand
// and the acceptance tests.
namespace gsopt::verify {

struct SuiteResult {
  std::string name;
  int count = 0;
  double max_abs_dev = 0.0;
  double tolerance = 1e-6;
  bool pass = false;
};

// Compares every prox operator against its independent reference on `count`
// random instances per suite: weighted l1, group l2, group lp (p = 1.5, 3),
// fidelity (r = 1, 1.5, 2, 4), and the infinity-norm prox.
std::vector<SuiteResult> run_prox_suites(std::uint64_t seed, int count);

bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace gsopt::verify
