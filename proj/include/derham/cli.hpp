#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace derham {

// One run of the tool; the seed fully determines all stochastic sampling,
// so identical configs produce byte-identical reports.
struct RunConfig {
  std::string command;
  std::string input;       // --input
  std::string norm_input;  // --norm (norm commands also accept --input)
  double tol_metric = -1.0;
  double tol_sq = -1.0;
  std::uint64_t seed = 1;
  long budget = -1;  // command-specific cap; negative selects the default
  std::string output;
  std::string format = "json";
  // generate parameters
  std::string kind;
  std::vector<int> sizes;
  int dim = 4;
  int vertices = 4;
  std::vector<std::string> components;
  bool distort = false;
};

// exit 0: pass/success verdict. exit 2: the tool ran and verified a negative
// verdict (not a metric, not a product, precondition refusal). exit 1:
// structural errors (parse failures, bad flags, exhausted budgets).
int run_cli(const std::vector<std::string>& args);

}  // namespace derham
