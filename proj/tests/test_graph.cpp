#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sip/graph.hpp"

#include <cmath>
#include <random>

using namespace sip;

namespace {

GraphSpec spec_of(GraphKind kind, int nodes, int window = 1) {
  GraphSpec s;
  s.kind = kind;
  s.nodes = nodes;
  s.window = window;
  return s;
}

void check_doubly_stochastic(const Eigen::MatrixXd& a) {
  for (int i = 0; i < a.rows(); ++i) {
    CHECK(a.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.col(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < a.cols(); ++j) CHECK(a(i, j) >= 0.0);
  }
}

}  // namespace

TEST_CASE("static cycle V=3 is the expected circulant") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticCycle, 3));
  const Eigen::MatrixXd a = g.weight_matrix(1);
  check_doubly_stochastic(a);
  for (int i = 0; i < 3; ++i) {
    CHECK(a(i, i) == doctest::Approx(0.5));
    CHECK(a(i, (i + 2) % 3) == doctest::Approx(0.5));  // in-neighbor (i-1 mod 3)
  }
  CHECK(g.min_weight() == doctest::Approx(0.5));
}

TEST_CASE("static line V=2 lazy-Metropolis is the averaging matrix") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticLine, 2));
  const Eigen::MatrixXd a = g.weight_matrix(7);
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(0, 1) == doctest::Approx(0.5));
  CHECK(a(1, 0) == doctest::Approx(0.5));
  CHECK(a(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("every generator emits doubly stochastic matrices") {
  for (GraphKind kind : {GraphKind::StaticCycle, GraphKind::StaticLine,
                         GraphKind::PeriodicRotation, GraphKind::SeededGossip}) {
    const int window = kind == GraphKind::PeriodicRotation ? 3 : (kind == GraphKind::SeededGossip ? 7 : 1);
    const auto g = TimeVaryingGraph::make(spec_of(kind, 7, window));
    for (long k = 1; k <= 20; ++k) check_doubly_stochastic(g.weight_matrix(k));
  }
}

TEST_CASE("periodic rotation B=3 V=4: every 3-round union is strongly connected") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::PeriodicRotation, 4, 3));
  for (long start = 1; start <= 6; ++start) {
    std::vector<Eigen::MatrixXd> window;
    for (long k = start; k < start + 3; ++k) window.push_back(g.weight_matrix(k));
    CHECK(union_strongly_connected(window));
  }
}

TEST_CASE("validate_graph passes on static cycle V=10 with min entry 0.5") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticCycle, 10));
  const auto report = validate_graph(g, 100);
  CHECK(report.passed);
  REQUIRE(report.rows.size() == 100);
  for (const auto& row : report.rows) {
    CHECK(row.min_pos_entry == doctest::Approx(0.5));
    CHECK(row.max_row_residual <= 1e-12);
    CHECK(row.max_col_residual <= 1e-12);
    CHECK(row.window_connected);
  }
}

TEST_CASE("seeded gossip with a too-small declared window fails validation") {
  // one exchanged pair per round: no 2-round union can connect 4 nodes
  auto s = spec_of(GraphKind::SeededGossip, 4, 2);
  s.seed = 3;
  const auto g = TimeVaryingGraph::make(s);
  const auto report = validate_graph(g, 20);
  CHECK_FALSE(report.passed);
  bool any_disconnected = false;
  for (const auto& row : report.rows) any_disconnected = any_disconnected || !row.window_connected;
  CHECK(any_disconnected);
}

TEST_CASE("transition product basics") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticCycle, 5));
  const Eigen::MatrixXd a = g.weight_matrix(3);
  CHECK((g.transition_product(3, 3) - a).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((g.transition_product(4, 3) - Eigen::MatrixXd(a * a)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS(g.transition_product(2, 3));
}

TEST_CASE("transition product is associative across any split point") {
  std::mt19937_64 rng(9);
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::PeriodicRotation, 6, 3));
  for (int trial = 0; trial < 20; ++trial) {
    const long s = 1 + static_cast<long>(rng() % 40);
    const long t = s + 2 + static_cast<long>(rng() % 40);
    const long r = s + static_cast<long>(rng() % static_cast<unsigned long>(t - s - 1));
    const Eigen::MatrixXd whole = g.transition_product(t, s);
    const Eigen::MatrixXd split = g.transition_product(t, r + 1) * g.transition_product(r, s);
    CHECK((whole - split).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("transition constants match the closed form for V=10, eta=0.5, B=1") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticCycle, 10));
  const auto c = g.transition_constants();
  const double base = 1.0 - 0.5 / 400.0;
  CHECK(c.gamma == doctest::Approx(std::pow(base, -2.0)).epsilon(1e-12));
  CHECK(c.gamma == doctest::Approx(1.002506).epsilon(1e-5));
  CHECK(c.beta == doctest::Approx(0.99875).epsilon(1e-12));
  CHECK(transition_decay_bound(c, 5001, 1) < 2e-3);
  // monotone decreasing in t-s
  CHECK(transition_decay_bound(c, 3, 1) < transition_decay_bound(c, 2, 1));
}

TEST_CASE("cycle V=10: entries of Phi(t,s) decay to 1/V within the bound") {
  const auto g = TimeVaryingGraph::make(spec_of(GraphKind::StaticCycle, 10));
  const auto c = g.transition_constants();
  const Eigen::MatrixXd phi = g.transition_product(201, 1);
  const double bound = transition_decay_bound(c, 201, 1);
  CHECK((phi.array() - 0.1).abs().maxCoeff() <= bound);
}

TEST_CASE("random (t,s) decay bound holds on generated graphs") {
  std::mt19937_64 rng(4);
  for (GraphKind kind : {GraphKind::StaticCycle, GraphKind::PeriodicRotation}) {
    const auto g = TimeVaryingGraph::make(spec_of(kind, 6, kind == GraphKind::PeriodicRotation ? 2 : 1));
    const auto c = g.transition_constants();
    for (int trial = 0; trial < 30; ++trial) {
      const long s = 1 + static_cast<long>(rng() % 100);
      const long t = s + 1 + static_cast<long>(rng() % 500);
      const Eigen::MatrixXd phi = g.transition_product(t, s);
      CHECK((phi.array() - 1.0 / 6.0).abs().maxCoeff() <= transition_decay_bound(c, t, s));
    }
  }
}

TEST_CASE("graph kind names round-trip") {
  for (GraphKind kind : {GraphKind::StaticCycle, GraphKind::StaticLine,
                         GraphKind::PeriodicRotation, GraphKind::SeededGossip})
    CHECK(graph_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(graph_kind_from_string("mesh"), std::invalid_argument);
}
