#include "sip/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sip {

namespace {

constexpr double kStochasticTol = 1e-12;

Eigen::MatrixXd identity_matrix(int n) { return Eigen::MatrixXd::Identity(n, n); }

// Symmetric averaging between a set of disjoint node pairs; rows/columns of
// every other node are left as the identity.
Eigen::MatrixXd pairwise_gossip_matrix(int n, const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd a = identity_matrix(n);
  for (const auto& [i, j] : pairs) {
    a(i, i) = 0.5;
    a(j, j) = 0.5;
    a(i, j) = 0.5;
    a(j, i) = 0.5;
  }
  return a;
}

Eigen::MatrixXd cycle_matrix(int n, double self_weight) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = self_weight;
    a(i, (i + n - 1) % n) = 1.0 - self_weight;  // receive from in-neighbor i-1
  }
  return a;
}

// Lazy-Metropolis weights on the bidirected path: w_ij = 1/(2 max(deg_i, deg_j))
// for neighbors, remainder on the diagonal. Doubly stochastic by symmetry.
Eigen::MatrixXd line_matrix(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  auto deg = [n](int i) { return (i == 0 || i == n - 1) ? 1 : 2; };
  for (int i = 0; i + 1 < n; ++i) {
    const double w = 1.0 / (2.0 * std::max(deg(i), deg(i + 1)));
    a(i, i + 1) = w;
    a(i + 1, i) = w;
  }
  for (int i = 0; i < n; ++i) a(i, i) = 1.0 - a.row(i).sum();
  return a;
}

// Ring pair p = (p, p+1 mod n). Two pairs conflict when they share a node.
bool pairs_conflict(int n, int p, int q) {
  const int pa = p, pb = (p + 1) % n;
  const int qa = q, qb = (q + 1) % n;
  return pa == qa || pa == qb || pb == qa || pb == qb;
}

// Partition the ring's pairs into B groups activated round-robin. Greedy
// assignment p -> p mod B with conflict fallback; the union over any B
// consecutive rounds contains every ring pair.
std::vector<std::vector<int>> partition_ring_pairs(int n, int groups) {
  std::vector<std::vector<int>> out(groups);
  for (int p = 0; p < n; ++p) {
    bool placed = false;
    for (int off = 0; off < groups && !placed; ++off) {
      const int g = (p + off) % groups;
      bool ok = true;
      for (int q : out[g]) {
        if (pairs_conflict(n, p, q)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out[g].push_back(p);
        placed = true;
      }
    }
    if (!placed) throw std::runtime_error("periodic-rotation: cannot partition ring pairs into " + std::to_string(groups) + " groups");
  }
  return out;
}

void check_doubly_stochastic(const Eigen::MatrixXd& a, double eta) {
  const int n = static_cast<int>(a.rows());
  for (int i = 0; i < n; ++i) {
    if (std::abs(a.row(i).sum() - 1.0) > kStochasticTol || std::abs(a.col(i).sum() - 1.0) > kStochasticTol)
      throw std::runtime_error("weight matrix is not doubly stochastic");
    for (int j = 0; j < n; ++j) {
      if (a(i, j) < 0.0) throw std::runtime_error("negative weight entry");
      if (a(i, j) > 0.0 && a(i, j) < eta - kStochasticTol)
        throw std::runtime_error("positive weight below minimum eta");
    }
  }
}

}  // namespace

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "static-cycle") return GraphKind::StaticCycle;
  if (name == "static-line") return GraphKind::StaticLine;
  if (name == "periodic-rotation") return GraphKind::PeriodicRotation;
  if (name == "seeded-gossip") return GraphKind::SeededGossip;
  throw std::invalid_argument("unknown graph kind: " + name);
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::StaticCycle: return "static-cycle";
    case GraphKind::StaticLine: return "static-line";
    case GraphKind::PeriodicRotation: return "periodic-rotation";
    case GraphKind::SeededGossip: return "seeded-gossip";
  }
  return "?";
}

double transition_decay_bound(const TransitionConstants& c, long t, long s) {
  if (t <= s || s < 1) throw std::invalid_argument("transition_decay_bound requires t > s >= 1");
  return c.gamma * std::pow(c.beta, static_cast<double>(t - s));
}

TimeVaryingGraph::TimeVaryingGraph(GraphSpec spec, std::vector<Eigen::MatrixXd> period, double eta)
    : spec_(std::move(spec)), period_(std::move(period)), eta_(eta) {}

TimeVaryingGraph TimeVaryingGraph::make(const GraphSpec& spec) {
  if (spec.nodes < 1) throw std::invalid_argument("graph needs at least one node");
  if (spec.window < 1) throw std::invalid_argument("connectivity window B must be >= 1");

  const int n = spec.nodes;
  std::vector<Eigen::MatrixXd> period;
  double eta = 0.0;

  switch (spec.kind) {
    case GraphKind::StaticCycle: {
      if (spec.self_weight <= 0.0 || spec.self_weight >= 1.0)
        throw std::invalid_argument("static-cycle self_weight must lie in (0,1)");
      period.push_back(n == 1 ? identity_matrix(1) : cycle_matrix(n, spec.self_weight));
      eta = n == 1 ? 1.0 : std::min(spec.self_weight, 1.0 - spec.self_weight);
      break;
    }
    case GraphKind::StaticLine: {
      period.push_back(n == 1 ? identity_matrix(1) : line_matrix(n));
      eta = n == 1 ? 1.0 : 0.25;
      break;
    }
    case GraphKind::PeriodicRotation: {
      if (n < 3) throw std::invalid_argument("periodic-rotation needs at least 3 nodes");
      if (spec.window < 2) throw std::invalid_argument("periodic-rotation needs B >= 2");
      const auto groups = partition_ring_pairs(n, spec.window);
      for (const auto& group : groups) {
        std::vector<std::pair<int, int>> pairs;
        for (int p : group) pairs.emplace_back(p, (p + 1) % n);
        period.push_back(pairwise_gossip_matrix(n, pairs));
      }
      eta = 0.5;
      break;
    }
    case GraphKind::SeededGossip: {
      if (n < 2) throw std::invalid_argument("seeded-gossip needs at least 2 nodes");
      // One ring pair per round, in a seed-shuffled order of period n.
      std::vector<int> order(n);
      for (int p = 0; p < n; ++p) order[p] = p;
      std::mt19937_64 rng(spec.seed);
      std::shuffle(order.begin(), order.end(), rng);
      for (int p : order) period.push_back(pairwise_gossip_matrix(n, {{p, (p + 1) % n}}));
      eta = 0.5;
      break;
    }
  }

  for (const auto& a : period) check_doubly_stochastic(a, eta);
  return TimeVaryingGraph(spec, std::move(period), eta);
}

Eigen::MatrixXd TimeVaryingGraph::weight_matrix(long k) const {
  if (k < 1) throw std::invalid_argument("round index must be >= 1");
  return period_[static_cast<std::size_t>((k - 1) % static_cast<long>(period_.size()))];
}

Eigen::MatrixXd TimeVaryingGraph::transition_product(long t, long s) const {
  if (t < s || s < 1) throw std::invalid_argument("transition_product requires t >= s >= 1");
  Eigen::MatrixXd phi = weight_matrix(s);
  for (long k = s + 1; k <= t; ++k) phi = weight_matrix(k) * phi;
  return phi;
}

TransitionConstants TimeVaryingGraph::transition_constants() const {
  const double v = static_cast<double>(spec_.nodes);
  const double r = 1.0 - eta_ / (4.0 * v * v);
  return {std::pow(r, -2.0), std::pow(r, 1.0 / static_cast<double>(spec_.window))};
}

bool union_strongly_connected(const std::vector<Eigen::MatrixXd>& window) {
  if (window.empty()) return false;
  const int n = static_cast<int>(window.front().rows());
  if (n == 1) return true;

  // adjacency: edge j -> i when any A(k)(i,j) > 0
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (const auto& a : window) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (a(i, j) > 0.0 && i != j) {
          fwd[j].push_back(i);
          rev[i].push_back(j);
        }
  }

  auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    return count == n;
  };
  return reaches_all(fwd) && reaches_all(rev);
}

GraphValidationReport validate_graph(const TimeVaryingGraph& graph, long horizon) {
  if (horizon < graph.window()) throw std::invalid_argument("validation horizon must cover at least one window");
  GraphValidationReport report;
  report.passed = true;
  const int n = graph.size();
  const long b = graph.window();

  for (long k = 1; k <= horizon; ++k) {
    const Eigen::MatrixXd a = graph.weight_matrix(k);
    GraphValidationRow row;
    row.round = k;
    row.min_pos_entry = 1.0;
    for (int i = 0; i < n; ++i) {
      row.max_row_residual = std::max(row.max_row_residual, std::abs(a.row(i).sum() - 1.0));
      row.max_col_residual = std::max(row.max_col_residual, std::abs(a.col(i).sum() - 1.0));
      for (int j = 0; j < n; ++j)
        if (a(i, j) > 0.0) row.min_pos_entry = std::min(row.min_pos_entry, a(i, j));
    }
    if (k + b - 1 <= horizon) {
      std::vector<Eigen::MatrixXd> window;
      for (long t = k; t < k + b; ++t) window.push_back(graph.weight_matrix(t));
      row.window_connected = union_strongly_connected(window);
    }
    const bool ok = row.max_row_residual <= kStochasticTol && row.max_col_residual <= kStochasticTol &&
                    row.min_pos_entry >= graph.min_weight() - kStochasticTol && row.window_connected;
    report.passed = report.passed && ok;
    report.rows.push_back(row);
  }
  return report;
}

std::string GraphValidationReport::summary() const {
  double row_res = 0.0, col_res = 0.0, min_pos = 1.0;
  long bad_window = -1;
  for (const auto& r : rows) {
    row_res = std::max(row_res, r.max_row_residual);
    col_res = std::max(col_res, r.max_col_residual);
    min_pos = std::min(min_pos, r.min_pos_entry);
    if (!r.window_connected && bad_window < 0) bad_window = r.round;
  }
  std::ostringstream out;
  out << "graph validation: " << (passed ? "pass" : "FAIL") << "\n"
      << "  rounds checked:        " << rows.size() << "\n"
      << "  max row-sum residual:  " << row_res << "\n"
      << "  max col-sum residual:  " << col_res << "\n"
      << "  min positive entry:    " << min_pos << "\n";
  if (bad_window >= 0) out << "  first disconnected window starts at round " << bad_window << "\n";
  return out.str();
}

void GraphValidationReport::write_csv(std::ostream& out) const {
  out << "round,max_row_residual,max_col_residual,min_pos_entry,window_connected\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%d\n", r.round, r.max_row_residual,
                  r.max_col_residual, r.min_pos_entry, r.window_connected ? 1 : 0);
    out << buf;
  }
}

}  // namespace sip
