#ifndef SIP_CONFIG_HPP
#define SIP_CONFIG_HPP

#include "sip/catalog.hpp"
#include "sip/graph.hpp"
#include "sip/solver.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sip {

/// Configuration problem: message names the offending field ("solver.iterations: ...").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProblemConfig {
  std::string name = "quad_abs_10";
  CatalogParams params;
};

struct BaselineConfig {
  std::vector<long> scenario_counts;  // one baseline run per entry
  std::uint64_t seed = 1;
};

struct AnalysisConfig {
  int oracle_points = 0;               // 0 -> resolution derived from the problem
  long certification_samples = 1000;   // meta-control certification draws
  std::uint64_t certification_seed = 7;
  std::string reference_mode = "grid";  // "grid" | "algorithm"
  int reference_points = 1001;          // grid mode lattice resolution
  long reference_iterations = 200000;   // algorithm mode horizon
  long validation_horizon = 200;        // cmd_validate rounds
  long g0_estimator_samples = 20000;
  double g0_estimator_delta = 0.05;
};

struct ExperimentConfig {
  std::string run_id = "run";
  std::string output_dir = "out";
  ProblemConfig problem;
  GraphSpec graph;
  SolverConfig solver;
  std::optional<BaselineConfig> baseline;
  AnalysisConfig analysis;
};

/// Parses and validates a JSON config file; throws ConfigError naming the
/// field on any violation.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace sip

#endif  // SIP_CONFIG_HPP
