#ifndef SIP_SOLVER_HPP
#define SIP_SOLVER_HPP

#include "sip/graph.hpp"
#include "sip/problem.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sip {

struct SolverConfig {
  long iterations = 1000;   // K
  double step_scale = 1.0;  // gamma_k = step_scale * D / sqrt(k)
  double tol_scale = 1.0;   // eps_k = tol_scale / sqrt(k)
  long inner_cap = 0;       // 0 -> 10x the round-1 theoretical cap
  bool initial_repair = true;
  std::uint64_t seed = 0;
  int threads = 1;
  bool record_timing = true;
};

/// Stepsize and tolerance schedules derived from (config, domain diameter).
struct StepRules {
  double gamma_scale = 0.0;  // step_scale * D
  double eps_scale = 0.0;    // tol_scale

  double gamma(long k) const { return gamma_scale / std::sqrt(static_cast<double>(k)); }
  double eps(long k) const { return eps_scale / std::sqrt(static_cast<double>(k)); }

  static StepRules make(const SolverConfig& config, const SipProblem& problem);
};

struct RoundRecord {
  long k = 0;
  int node = 0;
  double objective = 0.0;      // sum_j F_j(x_{k+1}^i)
  double violation = 0.0;      // independent max_u f(x_{k+1}^i, u)
  double consensus_err = 0.0;  // ||xhat_{k+1} - x_{k+1}^i||
  long inner_steps = 0;
  long node_round_ns = 0;
};

/// Network-average diagnostics per round (comparison plots use these).
struct RoundAverage {
  long k = 0;
  double objective_at_avg = 0.0;
  double violation_at_avg = 0.0;
  double mean_node_ns = 0.0;
};

struct RunMetrics {
  std::vector<RoundRecord> records;        // K*V rows, round-major, node order
  std::vector<RoundAverage> round_averages;
  double initial_norm_sum = 0.0;           // sum_j ||x_1^j||
  long max_inner_steps = 0;
};

struct RunResult {
  std::vector<Vector> averages;  // returned tail averages, one per node
  std::vector<Vector> finals;    // x_{K+1}^i
  RunMetrics metrics;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(std::string msg, long round, int node)
      : std::runtime_error(std::move(msg)), round_(round), node_(node) {}
  long round() const { return round_; }
  int node() const { return node_; }

 private:
  long round_;
  int node_;
};

/// Independent violation measure used for the metric stream; defaults to the
/// problem's own maximizer when absent.
using ViolationOracle = std::function<double(const Vector&)>;

/// Per-node index subsets for the finite-constraint (scenario) variant; empty
/// means every node maximizes over the full constraint.
using NodeScenarios = std::vector<std::vector<Vector>>;

Vector mix(const Eigen::RowVectorXd& weights, const std::vector<Vector>& estimates);
Vector outer_step(const Vector& v, const Vector& g, double gamma, const DomainSet& domain);
Vector ball_project(const Vector& center, double radius, const Vector& p);
double polyak_step(double f_val, double grad_norm_sq);

struct InnerResult {
  Vector x;
  long steps = 0;
};

/// Polyak-stepsize feasibility descent from z, restricted to the round's ball
/// intersected with the domain, until the worst-case constraint value drops
/// to eps_{k+1}.
InnerResult inner_descent(const Vector& z, long k, const SipProblem& problem,
                          const StepRules& rules, long cap,
                          const std::vector<Vector>* scenario_subset = nullptr);

/// Theoretical per-round inner-iteration cap (used for the safety default).
double inner_step_cap(long k, const SipProblem& problem, const StepRules& rules);

/// Deterministic initial estimates, uniform over the domain under the seed.
std::vector<Vector> initial_estimates(const SipProblem& problem, int count, std::uint64_t seed);

RunResult run(const SipProblem& problem, const TimeVaryingGraph& graph, const SolverConfig& config,
              const ViolationOracle& violation = {}, const NodeScenarios* scenarios = nullptr);

}  // namespace sip

#endif  // SIP_SOLVER_HPP
