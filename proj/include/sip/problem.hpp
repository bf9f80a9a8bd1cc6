#ifndef SIP_PROBLEM_HPP
#define SIP_PROBLEM_HPP

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sip {

using Vector = Eigen::VectorXd;

/// Compact convex domain X with closed-form Euclidean projection.
struct DomainSet {
  enum class Kind { Box, Ball };

  Kind kind = Kind::Box;
  Vector lower, upper;   // box
  Vector center;         // ball
  double radius = 0.0;   // ball
  int dim = 0;

  static DomainSet box(Vector lo, Vector hi);
  static DomainSet ball(Vector center, double radius);

  double diameter() const;
  Vector project(const Vector& p) const;
  bool contains(const Vector& p, double tol = 1e-9) const;
};

struct LocalObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  double grad_bound = 0.0;  // L_F_i, declared bound on ||subgradient|| over X
};

/// Compact box index set U in R^m.
struct IndexSet {
  Vector lower, upper;
  int dim = 0;

  static IndexSet box(Vector lo, Vector hi);
  bool contains(const Vector& u, double tol = 1e-9) const;
};

enum class MaximizerStrategy {
  Analytic,      // problem supplies the exact maximizer
  Grid,          // uniform grid, lexicographically-first winner
  GridRefined,   // grid + per-coordinate golden-section refinement (m = 1)
  FiniteSet,     // maximize over an explicit finite sample of U
};

struct MaxResult {
  Vector point;
  double value = 0.0;
};

struct SemiInfiniteConstraint {
  std::function<double(const Vector&, const Vector&)> value;   // f(x,u)
  std::function<Vector(const Vector&, const Vector&)> grad_x;  // d/dx f(x,u)
  IndexSet index_set;
  MaximizerStrategy strategy = MaximizerStrategy::Grid;
  std::function<MaxResult(const Vector&)> analytic_max;  // Analytic strategy only
  std::vector<Vector> finite_points;                     // FiniteSet strategy only
  int grid_points_per_dim = 101;
  double refine_width = 1e-8;
  double grad_bound = 0.0;        // L_G over X x U
  double level_grad_floor = 0.0;  // G0, gradient lower bound on the zero level set
};

/// argmax_{u in U} f(x,u) under the constraint's configured strategy.
/// Grid ties break to the lexicographically-first grid point.
MaxResult inner_maximize(const SemiInfiniteConstraint& c, const Vector& x);

/// Grid/refined maximization at an explicit resolution, independent of the
/// constraint's own strategy. Used by verification oracles.
MaxResult grid_maximize(const SemiInfiniteConstraint& c, const Vector& x, int points_per_dim,
                        bool golden_refine);

/// Maximum of f(x,.) over an explicit finite set, lexicographic tie-break.
MaxResult finite_maximize(const SemiInfiniteConstraint& c, const Vector& x,
                          const std::vector<Vector>& points);

struct SipProblem {
  std::string name;
  DomainSet domain;
  std::vector<LocalObjective> objectives;
  SemiInfiniteConstraint constraint;
  std::optional<Vector> known_optimizer;
  std::optional<double> known_optimum;

  int node_count() const { return static_cast<int>(objectives.size()); }
  int dim() const { return domain.dim; }

  double objective_grad_bound() const;  // L_F = max_i L_F_i
  double combined_grad_bound() const;   // L = max(L_F, L_G)

  double total_objective(const Vector& x) const;  // sum_i F_i(x)
};

/// Sum of one consistent subgradient selection per local objective.
Vector subgradient_sum(const SipProblem& problem, const Vector& x);

}  // namespace sip

#endif  // SIP_PROBLEM_HPP
