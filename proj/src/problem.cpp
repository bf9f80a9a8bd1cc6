#include "sip/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sip {

DomainSet DomainSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("box bounds must have equal nonzero dimension");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("box requires lower < upper in every coordinate");
  DomainSet d;
  d.kind = Kind::Box;
  d.lower = std::move(lo);
  d.upper = std::move(hi);
  d.dim = static_cast<int>(d.lower.size());
  return d;
}

DomainSet DomainSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball center must be nonempty");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  DomainSet d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  d.dim = static_cast<int>(d.center.size());
  return d;
}

double DomainSet::diameter() const {
  return kind == Kind::Box ? (upper - lower).norm() : 2.0 * radius;
}

Vector DomainSet::project(const Vector& p) const {
  if (kind == Kind::Box) return p.cwiseMax(lower).cwiseMin(upper);
  const Vector d = p - center;
  const double n = d.norm();
  if (n <= radius) return p;
  return center + (radius / n) * d;
}

bool DomainSet::contains(const Vector& p, double tol) const {
  if (kind == Kind::Box)
    return (p.array() >= lower.array() - tol).all() && (p.array() <= upper.array() + tol).all();
  return (p - center).norm() <= radius + tol;
}

IndexSet IndexSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("index set bounds must have equal nonzero dimension");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("index set requires lower <= upper");
  IndexSet s;
  s.lower = std::move(lo);
  s.upper = std::move(hi);
  s.dim = static_cast<int>(s.lower.size());
  return s;
}

bool IndexSet::contains(const Vector& u, double tol) const {
  return (u.array() >= lower.array() - tol).all() && (u.array() <= upper.array() + tol).all();
}

namespace {

// Golden-section search for the maximum of a unimodal 1-D slice.
double golden_refine_coord(const std::function<double(double)>& f, double lo, double hi, double width) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

MaxResult grid_maximize(const SemiInfiniteConstraint& c, const Vector& x, int points_per_dim,
                        bool golden_refine) {
  if (points_per_dim < 2) throw std::invalid_argument("grid maximizer needs at least 2 points per dimension");
  const int m = c.index_set.dim;
  const Vector& lo = c.index_set.lower;
  const Vector& hi = c.index_set.upper;

  // Lexicographic sweep; strict improvement keeps the first winner.
  Vector u(m), best_u(m);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(m, 0);
  const long total = static_cast<long>(std::pow(points_per_dim, m));
  for (long it = 0; it < total; ++it) {
    for (int d = 0; d < m; ++d)
      u[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (points_per_dim - 1);
    const double v = c.value(x, u);
    if (v > best) {
      best = v;
      best_u = u;
    }
    for (int d = m - 1; d >= 0; --d) {
      if (++idx[d] < points_per_dim) break;
      idx[d] = 0;
    }
  }

  if (golden_refine) {
    const double h0 = (hi - lo).cwiseQuotient(Vector::Constant(m, points_per_dim - 1.0)).maxCoeff();
    Vector refined = best_u;
    for (int d = 0; d < m; ++d) {
      const double h = (hi[d] - lo[d]) / (points_per_dim - 1);
      if (h <= 0.0) continue;
      const double a = std::max(lo[d], refined[d] - h);
      const double b = std::min(hi[d], refined[d] + h);
      Vector probe = refined;
      auto slice = [&](double t) {
        probe[d] = t;
        return c.value(x, probe);
      };
      refined[d] = golden_refine_coord(slice, a, b, std::min(c.refine_width, h0));
    }
    const double rv = c.value(x, refined);
    if (rv > best) {
      best = rv;
      best_u = refined;
    }
  }
  return {best_u, best};
}

MaxResult finite_maximize(const SemiInfiniteConstraint& c, const Vector& x,
                          const std::vector<Vector>& points) {
  if (points.empty()) throw std::invalid_argument("finite maximizer needs at least one point");
  MaxResult best{points.front(), c.value(x, points.front())};
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double v = c.value(x, points[i]);
    if (v > best.value) best = {points[i], v};
  }
  return best;
}

MaxResult inner_maximize(const SemiInfiniteConstraint& c, const Vector& x) {
  switch (c.strategy) {
    case MaximizerStrategy::Analytic:
      if (!c.analytic_max) throw std::logic_error("analytic maximizer not supplied");
      return c.analytic_max(x);
    case MaximizerStrategy::Grid:
      return grid_maximize(c, x, c.grid_points_per_dim, false);
    case MaximizerStrategy::GridRefined:
      return grid_maximize(c, x, c.grid_points_per_dim, true);
    case MaximizerStrategy::FiniteSet:
      return finite_maximize(c, x, c.finite_points);
  }
  throw std::logic_error("unreachable");
}

double SipProblem::objective_grad_bound() const {
  double lf = 0.0;
  for (const auto& o : objectives) lf = std::max(lf, o.grad_bound);
  return lf;
}

double SipProblem::combined_grad_bound() const {
  return std::max(objective_grad_bound(), constraint.grad_bound);
}

double SipProblem::total_objective(const Vector& x) const {
  double total = 0.0;
  for (const auto& o : objectives) total += o.value(x);
  return total;
}

Vector subgradient_sum(const SipProblem& problem, const Vector& x) {
  Vector g = Vector::Zero(problem.dim());
  for (const auto& o : problem.objectives) g += o.subgradient(x);
  return g;
}

}  // namespace sip
