#ifndef SIP_BASELINE_HPP
#define SIP_BASELINE_HPP

#include "sip/problem.hpp"
#include "sip/solver.hpp"

#include <cstdint>
#include <vector>

namespace sip {

/// Fixed scenario pool: N i.i.d. uniform draws from the index set, sampled
/// once before the run and never resampled.
struct ScenarioSet {
  std::vector<Vector> samples;
  std::uint64_t seed = 0;

  /// Even split across nodes in sample order; the remainder goes to the
  /// lowest node ids, one extra sample each.
  NodeScenarios node_allocation(int nodes) const;
};

ScenarioSet sample_scenarios(const IndexSet& index_set, long count, std::uint64_t seed);

/// Finite-constraint variant: each node enforces only its allocated scenarios,
/// everything else identical to the semi-infinite run. The metric stream's
/// violation column still measures the true semi-infinite violation.
RunResult run_scenario_baseline(const SipProblem& problem, const TimeVaryingGraph& graph,
                                const SolverConfig& config, const ScenarioSet& scenarios,
                                const ViolationOracle& violation = {});

}  // namespace sip

#endif  // SIP_BASELINE_HPP
