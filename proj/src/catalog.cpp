#include "sip/catalog.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace sip {

Eigen::Matrix2d MetaControlModel::system(double w) const {
  Eigen::Matrix2d a;
  a << 1.0, 0.01, -0.01 * w, 0.99;
  return a;
}

Eigen::Vector2d MetaControlModel::terminal_state(const Vector& u, double w) const {
  const Eigen::Matrix2d a = system(w);
  Eigen::Vector2d x = x0;
  for (int t = 0; t < horizon; ++t) x = a * x + input * u[t];
  return x;
}

void MetaControlModel::response(double w, Eigen::Matrix<double, 2, Eigen::Dynamic>& m,
                                Eigen::Vector2d& r) const {
  const Eigen::Matrix2d a = system(w);
  m.resize(2, horizon);
  Eigen::Vector2d p = input;  // A^(T-1-t) B, built from t = T-1 downward
  for (int t = horizon - 1; t >= 0; --t) {
    m.col(t) = p;
    p = a * p;
  }
  r = x0;
  for (int t = 0; t < horizon; ++t) r = a * r;
}

namespace {

constexpr std::array<double, 10> kQuadA = {-2, 3, -3, -5, -1, 0, 4, 2, -4, 1};
constexpr std::array<double, 10> kQuadB = {2, -2, 3, 5, 1, 0, -1, -3, 4, -4};
constexpr std::array<double, 10> kQuadC = {7, 3, 5, 1, 9, 11, 10, 14, 2.5, 12.5};

// Subgradient selection for |x0 + x1 - 4|: sign, zero at the kink.
double abs_term_sign(const Vector& x) {
  const double s = x[0] + x[1] - 4.0;
  if (s > 0.0) return 1.0;
  if (s < 0.0) return -1.0;
  return 0.0;
}

SipProblem build_quad_abs_10(const CatalogParams& params) {
  SipProblem p;
  p.name = "quad_abs_10";
  p.domain = DomainSet::box(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0));

  for (int i = 0; i < 10; ++i) {
    const double ai = kQuadA[i], bi = kQuadB[i], ci = kQuadC[i];
    LocalObjective obj;
    obj.value = [ai, bi, ci](const Vector& x) {
      return 0.1 * (x[0] - ai) * (x[0] - ai) + 0.1 * (x[1] - bi) * (x[1] - bi) +
             std::abs(x[0] + x[1] - 4.0) - ci;
    };
    obj.subgradient = [ai, bi](const Vector& x) {
      const double s = abs_term_sign(x);
      Vector g(2);
      g << 0.2 * (x[0] - ai) + s, 0.2 * (x[1] - bi) + s;
      return g;
    };
    obj.grad_bound = std::hypot(0.2 * (5.0 + std::abs(ai)) + 1.0, 0.2 * (5.0 + std::abs(bi)) + 1.0);
    if (params.l_f) obj.grad_bound = *params.l_f;
    p.objectives.push_back(std::move(obj));
  }

  SemiInfiniteConstraint c;
  c.index_set = IndexSet::box((Vector(2) << 0.5, 1.0).finished(), (Vector(2) << 2.5, 3.0).finished());
  c.value = [](const Vector& x, const Vector& u) { return u[0] * x[0] * x[0] + u[1] * x[1] - 4.0; };
  c.grad_x = [](const Vector& x, const Vector& u) {
    Vector g(2);
    g << 2.0 * u[0] * x[0], u[1];
    return g;
  };
  // f is affine in u with coefficients (x0^2, x1); x0^2 >= 0 pins d* = 2.5
  // and the sign of x1 picks the e-corner.
  c.strategy = MaximizerStrategy::Analytic;
  c.analytic_max = [](const Vector& x) {
    Vector u(2);
    u << 2.5, (x[1] >= 0.0 ? 3.0 : 1.0);
    return MaxResult{u, 2.5 * x[0] * x[0] + u[1] * x[1] - 4.0};
  };
  c.grid_points_per_dim = params.grid_points_m2;
  c.grad_bound = params.l_g.value_or(std::sqrt(25.0 * 25.0 + 3.0 * 3.0));  // max ||(2 d x0, e)||
  c.level_grad_floor = params.g0.value_or(3.0);  // attained at x0 = 0 on the zero level set
  p.constraint = std::move(c);

  p.known_optimum = -33.3732;
  p.known_optimizer = (Vector(2) << 0.53905, 1.09119).finished();
  return p;
}

// Cache of (M(w), r(w)) for grid values of w; immutable after build, so the
// constraint closures stay thread-safe.
struct MetaKernel {
  MetaControlModel model;
  std::unordered_map<std::uint64_t, std::pair<Eigen::Matrix<double, 2, Eigen::Dynamic>, Eigen::Vector2d>> cache;

  static std::uint64_t key(double w) {
    std::uint64_t k;
    static_assert(sizeof(k) == sizeof(w));
    std::memcpy(&k, &w, sizeof(k));
    return k;
  }

  void precompute_grid(int points) {
    for (int i = 0; i < points; ++i) {
      const double w = model.w_lo + (model.w_hi - model.w_lo) * i / (points - 1);
      Eigen::Matrix<double, 2, Eigen::Dynamic> m;
      Eigen::Vector2d r;
      model.response(w, m, r);
      cache.emplace(key(w), std::make_pair(std::move(m), std::move(r)));
    }
  }

  Eigen::Vector2d residual(const Vector& u, double w) const {
    const auto it = cache.find(key(w));
    if (it != cache.end()) return it->second.second + it->second.first * u;
    return model.terminal_state(u, w);
  }

  Vector gradient(const Vector& u, double w) const {
    const auto it = cache.find(key(w));
    if (it != cache.end()) return 2.0 * (it->second.first.transpose() * (it->second.second + it->second.first * u));
    Eigen::Matrix<double, 2, Eigen::Dynamic> m;
    Eigen::Vector2d r;
    model.response(w, m, r);
    return 2.0 * (m.transpose() * (r + m * u));
  }
};

struct LqCost {
  Eigen::Matrix2d a;
  Eigen::Matrix2d q;
  Eigen::Matrix2d p;
  double r = 0.0;
};

double lq_value(const LqCost& c, const MetaControlModel& model, const Vector& u) {
  Eigen::Vector2d x = model.x0;
  double total = 0.0;
  for (int t = 0; t < model.horizon; ++t) {
    total += x.dot(c.q * x) + c.r * u[t] * u[t];
    x = c.a * x + model.input * u[t];
  }
  return total + x.dot(c.p * x);
}

Vector lq_gradient(const LqCost& c, const MetaControlModel& model, const Vector& u) {
  const int t_end = model.horizon;
  std::vector<Eigen::Vector2d> traj(t_end + 1);
  traj[0] = model.x0;
  for (int t = 0; t < t_end; ++t) traj[t + 1] = c.a * traj[t] + model.input * u[t];

  Vector grad(t_end);
  Eigen::Vector2d lam = 2.0 * (c.p * traj[t_end]);
  for (int t = t_end - 1; t >= 0; --t) {
    grad[t] = 2.0 * c.r * u[t] + model.input.dot(lam);
    lam = 2.0 * (c.q * traj[t]) + c.a.transpose() * lam;
  }
  return grad;
}

// Upper bound on sup ||grad F|| over the box via ||grad F(0)|| + 2 ||H|| ||u||,
// with ||H|| from power iteration on the gradient map.
double lq_grad_bound(const LqCost& c, const MetaControlModel& model, double u_max) {
  const int n = model.horizon;
  const Vector g0 = lq_gradient(c, model, Vector::Zero(n));
  Vector v = Vector::Ones(n).normalized();
  double norm_h = 0.0;
  for (int it = 0; it < 60; ++it) {
    Vector hv = 0.5 * (lq_gradient(c, model, v) - g0);
    norm_h = hv.norm();
    if (norm_h == 0.0) break;
    v = hv / norm_h;
  }
  const double u_norm = u_max * std::sqrt(static_cast<double>(n));
  return g0.norm() + 2.0 * 1.05 * norm_h * u_norm;
}

SipProblem build_meta_control(const CatalogParams& params, MetaControlModel& model_out) {
  MetaControlModel model;
  const int n = model.horizon;

  SipProblem p;
  p.name = "meta_control";
  p.domain = DomainSet::box(Vector::Constant(n, -params.u_max), Vector::Constant(n, params.u_max));

  const std::array<double, 4> node_w = {10.0, 12.0, 15.0, 20.0};
  const std::array<std::array<double, 5>, 4> qpr = {{
      {1.0, 2.0, 1.0, 2.0, 0.1},
      {2.0, 1.5, 2.0, 1.5, 1.0},
      {1.5, 2.0, 1.5, 2.0, 1.0},
      {1.0, 1.0, 1.0, 1.0, 0.1},
  }};

  for (int i = 0; i < 4; ++i) {
    auto cost = std::make_shared<LqCost>();
    cost->a = model.system(node_w[i]);
    cost->q = Eigen::Vector2d(qpr[i][0], qpr[i][1]).asDiagonal();
    cost->p = Eigen::Vector2d(qpr[i][2], qpr[i][3]).asDiagonal();
    cost->r = qpr[i][4];

    LocalObjective obj;
    obj.value = [cost, model](const Vector& u) { return lq_value(*cost, model, u); };
    obj.subgradient = [cost, model](const Vector& u) { return lq_gradient(*cost, model, u); };
    obj.grad_bound = params.l_f.value_or(lq_grad_bound(*cost, model, params.u_max));
    p.objectives.push_back(std::move(obj));
  }

  auto kernel = std::make_shared<MetaKernel>();
  kernel->model = model;
  kernel->precompute_grid(params.grid_points_m1);
  kernel->precompute_grid(4 * (params.grid_points_m1 - 1) + 1);  // verification grid

  SemiInfiniteConstraint c;
  c.index_set = IndexSet::box(Vector::Constant(1, model.w_lo), Vector::Constant(1, model.w_hi));
  const double bound = model.terminal_bound;
  c.value = [kernel, bound](const Vector& u, const Vector& w) {
    return kernel->residual(u, w[0]).squaredNorm() - bound;
  };
  c.grad_x = [kernel](const Vector& u, const Vector& w) { return kernel->gradient(u, w[0]); };
  c.strategy = MaximizerStrategy::GridRefined;
  c.grid_points_per_dim = params.grid_points_m1;

  // L_G and G0 from the singular values of M(w) scanned over a fine w grid.
  double sigma_max = 0.0, sigma_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
  const int scan = 4001;
  for (int i = 0; i < scan; ++i) {
    const double w = model.w_lo + (model.w_hi - model.w_lo) * i / (scan - 1);
    Eigen::Matrix<double, 2, Eigen::Dynamic> m;
    Eigen::Vector2d r;
    model.response(w, m, r);
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    sigma_max = std::max(sigma_max, sv[0]);
    sigma_min = std::min(sigma_min, sv[1]);
    r_max = std::max(r_max, r.norm());
  }
  const double u_norm = params.u_max * std::sqrt(static_cast<double>(n));
  c.grad_bound = params.l_g.value_or(2.0 * 1.05 * sigma_max * (sigma_max * u_norm + r_max));
  c.level_grad_floor = params.g0.value_or(0.9 * 2.0 * std::sqrt(bound) * sigma_min);
  if (!(c.level_grad_floor > 0.0)) throw std::runtime_error("meta_control: nonpositive G0; configure problem.g0 explicitly");
  p.constraint = std::move(c);

  model_out = model;
  return p;
}

std::vector<Vector> sample_index_box(const IndexSet& u, long n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long s = 0; s < n; ++s) {
    Vector pt(u.dim);
    for (int d = 0; d < u.dim; ++d) pt[d] = u.lower[d] + (u.upper[d] - u.lower[d]) * unit(rng);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace

CatalogProblem catalog_build(const std::string& name, const CatalogParams& params) {
  CatalogProblem out;
  if (name == "quad_abs_10") {
    out.problem = build_quad_abs_10(params);
  } else if (name == "meta_control") {
    MetaControlModel model;
    out.problem = build_meta_control(params, model);
    out.meta = model;
  } else if (name == "finite_demo") {
    if (params.scenario_count < 1) throw std::invalid_argument("finite_demo needs scenario_count >= 1");
    out.problem = build_quad_abs_10(params);
    out.problem.name = "finite_demo";
    out.problem.constraint.strategy = MaximizerStrategy::FiniteSet;
    out.problem.constraint.finite_points =
        sample_index_box(out.problem.constraint.index_set, params.scenario_count, params.scenario_seed);
    out.problem.known_optimum.reset();
    out.problem.known_optimizer.reset();
  } else {
    throw std::invalid_argument("unknown problem name: " + name);
  }
  return out;
}

}  // namespace sip
