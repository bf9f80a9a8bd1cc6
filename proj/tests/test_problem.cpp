#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sip/catalog.hpp"
#include "sip/problem.hpp"

#include <cmath>
#include <random>

using namespace sip;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

Vector random_box_point(const DomainSet& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(dom.dim);
  for (int d = 0; d < dom.dim; ++d) x[d] = dom.lower[d] + (dom.upper[d] - dom.lower[d]) * unit(rng);
  return x;
}

}  // namespace

TEST_CASE("domain projection: box clamp, identity, ball radial scaling") {
  const auto box = DomainSet::box(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0));
  CHECK((box.project(vec2(6, 0)) - vec2(5, 0)).norm() == doctest::Approx(0.0));
  CHECK((box.project(vec2(1, -2)) - vec2(1, -2)).norm() == doctest::Approx(0.0));
  const auto ball = DomainSet::ball(Vector::Zero(2), 1.0);
  CHECK((ball.project(vec2(3, 4)) - vec2(0.6, 0.8)).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(box.diameter() == doctest::Approx(10.0 * std::sqrt(2.0)));
  CHECK(ball.diameter() == doctest::Approx(2.0));
  CHECK_THROWS(DomainSet::box(Vector::Constant(2, 1.0), Vector::Constant(2, 1.0)));
  CHECK_THROWS(DomainSet::ball(Vector::Zero(2), 0.0));
}

TEST_CASE("quad_abs_10 catalog data matches the published arrays") {
  const auto cat = catalog_build("quad_abs_10");
  const SipProblem& p = cat.problem;
  CHECK(p.node_count() == 10);
  CHECK(p.dim() == 2);
  CHECK(p.domain.diameter() == doctest::Approx(10.0 * std::sqrt(2.0)));
  REQUIRE(p.known_optimum.has_value());
  CHECK(*p.known_optimum == doctest::Approx(-33.3732));
  CHECK((*p.known_optimizer - vec2(0.53905, 1.09119)).norm() == doctest::Approx(0.0));
  // node 0: F_0(0,0) = 0.1*4 + 0.1*4 + 4 - 7 = -2.2
  CHECK(p.objectives[0].value(Vector::Zero(2)) == doctest::Approx(-2.2));
  // sum of c_i = 75, so F(0,0) = sum(0.1 a_i^2 + 0.1 b_i^2) + 40 - 75
  double expect = 40.0 - 75.0;
  const double a2 = 4 + 9 + 9 + 25 + 1 + 0 + 16 + 4 + 16 + 1;
  const double b2 = 4 + 4 + 9 + 25 + 1 + 0 + 1 + 9 + 16 + 16;
  expect += 0.1 * (a2 + b2);
  CHECK(p.total_objective(Vector::Zero(2)) == doctest::Approx(expect));
  CHECK(p.constraint.grad_bound == doctest::Approx(std::sqrt(25.0 * 25.0 + 9.0)));
  CHECK(p.constraint.level_grad_floor == doctest::Approx(3.0));
}

TEST_CASE("quad_abs_10 analytic maximizer: corner selection and values") {
  const auto p = catalog_build("quad_abs_10").problem;
  const MaxResult at11 = inner_maximize(p.constraint, vec2(1, 1));
  CHECK(at11.value == doctest::Approx(1.5));
  CHECK(at11.point[0] == doctest::Approx(2.5));
  CHECK(at11.point[1] == doctest::Approx(3.0));
  const MaxResult at00 = inner_maximize(p.constraint, vec2(0, 0));
  CHECK(at00.value == doctest::Approx(-4.0));
}

TEST_CASE("grid maximizer: lexicographic tie-break on a constant slice") {
  auto p = catalog_build("quad_abs_10").problem;
  p.constraint.strategy = MaximizerStrategy::Grid;
  // at x = (0,0) the constraint value is -4 for every u
  const MaxResult m = inner_maximize(p.constraint, Vector::Zero(2));
  CHECK(m.value == doctest::Approx(-4.0));
  CHECK(m.point[0] == doctest::Approx(0.5));
  CHECK(m.point[1] == doctest::Approx(1.0));
  CHECK_THROWS(grid_maximize(p.constraint, Vector::Zero(2), 1, false));
}

TEST_CASE("quad_abs_10: analytic and grid maximizers agree within the grid gap") {
  const auto p = catalog_build("quad_abs_10").problem;
  std::mt19937_64 rng(11);
  // slope of f in u is (x0^2, x1), at most (25, 5) on X; grid spacing 2/100
  const double gap = 30.0 * (2.0 / 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector x = random_box_point(p.domain, rng);
    const double exact = inner_maximize(p.constraint, x).value;
    const double gridded = grid_maximize(p.constraint, x, 101, false).value;
    CHECK(gridded <= exact + 1e-12);
    CHECK(exact <= gridded + gap);
  }
}

TEST_CASE("quad_abs_10 subgradients match finite differences away from the kink") {
  const auto p = catalog_build("quad_abs_10").problem;
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 1000 && checked < 600; ++trial) {
    const Vector x = random_box_point(p.domain, rng);
    if (std::abs(x[0] + x[1] - 4.0) < 1e-3) continue;
    if (std::min({x[0] + 5, 5 - x[0], x[1] + 5, 5 - x[1]}) < 1e-5) continue;
    ++checked;
    for (const auto& obj : p.objectives) {
      const Vector g = obj.subgradient(x);
      for (int d = 0; d < 2; ++d) {
        Vector lo = x, hi = x;
        lo[d] -= h;
        hi[d] += h;
        const double fd = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
        CHECK(g[d] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
  CHECK(checked >= 500);
}

TEST_CASE("quad_abs_10 kink subgradient uses the zero selection") {
  const auto p = catalog_build("quad_abs_10").problem;
  const Vector x = vec2(2.0, 2.0);  // x0 + x1 = 4 exactly
  const Vector g = p.objectives[5].subgradient(x);  // a_5 = 0, b_5 = 0
  CHECK(g[0] == doctest::Approx(0.2 * 2.0));
  CHECK(g[1] == doctest::Approx(0.2 * 2.0));
}

TEST_CASE("subgradient_sum at (0,0) matches the hand evaluation") {
  const auto p = catalog_build("quad_abs_10").problem;
  const Vector g = subgradient_sum(p, Vector::Zero(2));
  // sum_i (0.2(0 - a_i) - 1, 0.2(0 - b_i) - 1); sum a_i = -5, sum b_i = 5
  CHECK(g[0] == doctest::Approx(0.2 * 5.0 - 10.0));
  CHECK(g[1] == doctest::Approx(-0.2 * 5.0 - 10.0));
}

TEST_CASE("declared objective bounds dominate sampled subgradient norms") {
  const auto p = catalog_build("quad_abs_10").problem;
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector x = random_box_point(p.domain, rng);
    for (const auto& obj : p.objectives) CHECK(obj.subgradient(x).norm() <= obj.grad_bound + 1e-9);
    const Vector u = inner_maximize(p.constraint, x).point;
    CHECK(p.constraint.grad_x(x, u).norm() <= p.constraint.grad_bound + 1e-9);
  }
  CHECK(p.objective_grad_bound() == doctest::Approx(3.0 * std::sqrt(2.0)));
}

TEST_CASE("objectives satisfy the subgradient inequality on sampled pairs") {
  const auto p = catalog_build("quad_abs_10").problem;
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const Vector x = random_box_point(p.domain, rng);
    const Vector y = random_box_point(p.domain, rng);
    for (const auto& obj : p.objectives)
      CHECK(obj.subgradient(x).dot(y - x) <= obj.value(y) - obj.value(x) + 1e-9);
  }
}

TEST_CASE("meta_control catalog: dynamics, domain, constraint at zero input") {
  CatalogParams params;
  params.grid_points_m1 = 501;  // keep the unit test quick
  const auto cat = catalog_build("meta_control", params);
  const SipProblem& p = cat.problem;
  REQUIRE(cat.meta.has_value());
  CHECK(p.node_count() == 4);
  CHECK(p.dim() == 100);
  CHECK(p.domain.diameter() == doctest::Approx(200.0));

  const Eigen::Matrix2d a = cat.meta->system(15.0);
  CHECK(a(0, 0) == doctest::Approx(1.0));
  CHECK(a(0, 1) == doctest::Approx(0.01));
  CHECK(a(1, 0) == doctest::Approx(-0.15));
  CHECK(a(1, 1) == doctest::Approx(0.99));

  // constraint at u = 0 equals max_w ||A(w)^100 x0||^2 - 1.5 over the w-scan
  const Vector u0 = Vector::Zero(100);
  double scan_max = -1e300;
  for (int i = 0; i <= 2000; ++i) {
    const double w = 10.0 + 10.0 * i / 2000.0;
    scan_max = std::max(scan_max, cat.meta->terminal_state(u0, w).squaredNorm() - 1.5);
  }
  const MaxResult m = inner_maximize(p.constraint, u0);
  CHECK(m.value >= scan_max - 1e-9);       // refinement never loses to a coarser scan
  CHECK(m.value <= scan_max + 1e-4);       // and cannot exceed the true max by much
}

TEST_CASE("meta_control adjoint gradients match finite differences") {
  CatalogParams params;
  params.grid_points_m1 = 201;
  const auto p = catalog_build("meta_control", params).problem;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  Vector u(100);
  for (int d = 0; d < 100; ++d) u[d] = unit(rng);
  const double h = 1e-6;
  for (const auto& obj : p.objectives) {
    const Vector g = obj.subgradient(u);
    for (int d : {0, 17, 50, 99}) {
      Vector lo = u, hi = u;
      lo[d] -= h;
      hi[d] += h;
      const double fd = (obj.value(hi) - obj.value(lo)) / (2.0 * h);
      CHECK(g[d] == doctest::Approx(fd).epsilon(1e-5));
    }
    CHECK(g.norm() <= obj.grad_bound + 1e-9);
  }
  // constraint gradient at a fixed grid w
  const Vector w = Vector::Constant(1, 12.0);
  const Vector gc = p.constraint.grad_x(u, w);
  for (int d : {0, 42, 99}) {
    Vector lo = u, hi = u;
    lo[d] -= h;
    hi[d] += h;
    const double fd = (p.constraint.value(hi, w) - p.constraint.value(lo, w)) / (2.0 * h);
    CHECK(gc[d] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("meta_control objectives are convex along random segments") {
  CatalogParams params;
  params.grid_points_m1 = 201;
  const auto p = catalog_build("meta_control", params).problem;
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(100), y(100);
    for (int d = 0; d < 100; ++d) {
      x[d] = unit(rng);
      y[d] = unit(rng);
    }
    const Vector mid = 0.5 * (x + y);
    for (const auto& obj : p.objectives)
      CHECK(obj.value(mid) <= 0.5 * obj.value(x) + 0.5 * obj.value(y) + 1e-9);
  }
}

TEST_CASE("finite_demo replaces the index set by a reproducible finite sample") {
  CatalogParams params;
  params.scenario_count = 25;
  params.scenario_seed = 99;
  const auto one = catalog_build("finite_demo", params).problem;
  const auto two = catalog_build("finite_demo", params).problem;
  REQUIRE(one.constraint.finite_points.size() == 25);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK((one.constraint.finite_points[i] - two.constraint.finite_points[i]).norm() == 0.0);
    CHECK(one.constraint.index_set.contains(one.constraint.finite_points[i]));
  }
  CHECK(one.constraint.strategy == MaximizerStrategy::FiniteSet);
  CHECK_FALSE(one.known_optimum.has_value());
  CHECK_THROWS_AS(catalog_build("no_such_problem"), std::invalid_argument);
}
