#include "sip/baseline.hpp"

#include <random>
#include <stdexcept>

namespace sip {

ScenarioSet sample_scenarios(const IndexSet& index_set, long count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("scenario count must be positive");
  ScenarioSet set;
  set.seed = seed;
  set.samples.reserve(static_cast<std::size_t>(count));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long s = 0; s < count; ++s) {
    Vector u(index_set.dim);
    for (int d = 0; d < index_set.dim; ++d)
      u[d] = index_set.lower[d] + (index_set.upper[d] - index_set.lower[d]) * unit(rng);
    set.samples.push_back(std::move(u));
  }
  return set;
}

NodeScenarios ScenarioSet::node_allocation(int nodes) const {
  if (nodes < 1) throw std::invalid_argument("node count must be positive");
  if (samples.size() < static_cast<std::size_t>(nodes))
    throw std::invalid_argument("need at least one scenario per node");
  NodeScenarios out(static_cast<std::size_t>(nodes));
  const long n = static_cast<long>(samples.size());
  const long base = n / nodes;
  const long extra = n % nodes;
  long pos = 0;
  for (int i = 0; i < nodes; ++i) {
    const long take = base + (i < extra ? 1 : 0);
    auto& slot = out[static_cast<std::size_t>(i)];
    slot.assign(samples.begin() + pos, samples.begin() + pos + take);
    pos += take;
  }
  return out;
}

RunResult run_scenario_baseline(const SipProblem& problem, const TimeVaryingGraph& graph,
                                const SolverConfig& config, const ScenarioSet& scenarios,
                                const ViolationOracle& violation) {
  const NodeScenarios allocation = scenarios.node_allocation(graph.size());
  return run(problem, graph, config, violation, &allocation);
}

}  // namespace sip
