#ifndef SIP_CATALOG_HPP
#define SIP_CATALOG_HPP

#include "sip/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace sip {

/// Parameter-dependent discrete-time system behind the meta-control problem.
struct MetaControlModel {
  int horizon = 100;
  Eigen::Vector2d x0{0.5, 0.0};
  Eigen::Vector2d input{0.0, 0.01};
  double w_lo = 10.0;
  double w_hi = 20.0;
  double terminal_bound = 1.5;

  Eigen::Matrix2d system(double w) const;

  /// Terminal state A(w)^T x0 + sum_t A(w)^(T-1-t) B u_t by forward simulation.
  Eigen::Vector2d terminal_state(const Vector& u, double w) const;

  /// M(w) with columns A(w)^(T-1-t) B, and r(w) = A(w)^T x0.
  void response(double w, Eigen::Matrix<double, 2, Eigen::Dynamic>& m, Eigen::Vector2d& r) const;
};

struct CatalogParams {
  std::optional<double> g0;   // overrides the built-in / estimated G0
  std::optional<double> l_f;  // overrides per-node subgradient bounds (max)
  std::optional<double> l_g;  // overrides the constraint gradient bound
  double u_max = 10.0;        // meta_control box half-width
  int grid_points_m1 = 2001;  // maximizer grid, 1-D index sets
  int grid_points_m2 = 101;   // maximizer grid, 2-D index sets
  long scenario_count = 100;  // finite_demo sample size
  std::uint64_t scenario_seed = 0;
};

struct CatalogProblem {
  SipProblem problem;
  std::optional<MetaControlModel> meta;
};

/// name in {quad_abs_10, meta_control, finite_demo}.
CatalogProblem catalog_build(const std::string& name, const CatalogParams& params = {});

}  // namespace sip

#endif  // SIP_CATALOG_HPP
