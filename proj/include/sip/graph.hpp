#ifndef SIP_GRAPH_HPP
#define SIP_GRAPH_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sip {

enum class GraphKind {
  StaticCycle,
  StaticLine,
  PeriodicRotation,
  SeededGossip,
};

GraphKind graph_kind_from_string(const std::string& name);
std::string to_string(GraphKind kind);

/// Decay constants of the network transition matrix:
/// gamma = (1 - eta/(4 V^2))^(-2), beta = (1 - eta/(4 V^2))^(1/B).
struct TransitionConstants {
  double gamma = 0.0;  // > 1
  double beta = 0.0;   // in (0,1)
};

/// |[Phi(t,s)]_ij - 1/V| <= gamma * beta^(t-s), requires t > s >= 1.
double transition_decay_bound(const TransitionConstants& c, long t, long s);

struct GraphSpec {
  GraphKind kind = GraphKind::StaticCycle;
  int nodes = 0;
  int window = 1;            // B, connectivity window
  double self_weight = 0.5;  // static-cycle only
  std::uint64_t seed = 0;    // seeded-gossip only
};

struct GraphValidationRow {
  long round = 0;
  double max_row_residual = 0.0;
  double max_col_residual = 0.0;
  double min_pos_entry = 0.0;
  bool window_connected = true;
};

struct GraphValidationReport {
  std::vector<GraphValidationRow> rows;
  bool passed = false;
  std::string summary() const;
  void write_csv(std::ostream& out) const;
};

/// Deterministic schedule of doubly stochastic weight matrices A(k), k >= 1.
/// Immutable after construction; lookups are pure and thread-safe.
class TimeVaryingGraph {
 public:
  static TimeVaryingGraph make(const GraphSpec& spec);

  int size() const { return spec_.nodes; }
  int window() const { return spec_.window; }
  double min_weight() const { return eta_; }
  const GraphSpec& spec() const { return spec_; }

  Eigen::MatrixXd weight_matrix(long k) const;

  /// Phi(t,s) = A(t) A(t-1) ... A(s), t >= s >= 1.
  Eigen::MatrixXd transition_product(long t, long s) const;

  TransitionConstants transition_constants() const;

 private:
  TimeVaryingGraph(GraphSpec spec, std::vector<Eigen::MatrixXd> period, double eta);

  GraphSpec spec_;
  // Periodic schedule; round k uses period_[(k-1) % period_.size()].
  std::vector<Eigen::MatrixXd> period_;
  double eta_ = 0.0;
};

/// Checks (G1)-(G3) over rounds 1..horizon: row/column sums, minimum
/// positive weight, and strong connectivity of every B-round union digraph.
GraphValidationReport validate_graph(const TimeVaryingGraph& graph, long horizon);

/// Strong connectivity of the union digraph of a window of weight matrices.
/// Any positive entry counts as an edge (self-loops included but immaterial).
bool union_strongly_connected(const std::vector<Eigen::MatrixXd>& window);

}  // namespace sip

#endif  // SIP_GRAPH_HPP
