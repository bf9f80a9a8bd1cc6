#include "sip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sip {

namespace {

const double kLn2 = std::log(2.0);
const double kTailFactor = 2.0 - std::sqrt(2.0);  // sum_{k in T} 1/sqrt(k) >= this * sqrt(K)

}  // namespace

int oracle_resolution(const SipProblem& problem, int fallback) {
  const auto& c = problem.constraint;
  if (c.strategy == MaximizerStrategy::Grid || c.strategy == MaximizerStrategy::GridRefined)
    return 4 * (c.grid_points_per_dim - 1) + 1;
  return fallback;
}

double violation_oracle(const SipProblem& problem, const Vector& x, int points_per_dim) {
  const int points = points_per_dim > 0 ? points_per_dim : oracle_resolution(problem);
  const bool refine = problem.constraint.index_set.dim == 1;
  return grid_maximize(problem.constraint, x, points, refine).value;
}

double oracle_grid_gap(const SipProblem& problem, const Vector& x, int points_per_dim) {
  const int points = points_per_dim > 0 ? points_per_dim : oracle_resolution(problem);
  const auto& u_set = problem.constraint.index_set;
  const double h = (u_set.upper - u_set.lower).maxCoeff() / (points - 1);

  // sampled Lipschitz estimate of u -> f(x,u)
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double slope = 0.0;
  Vector u(u_set.dim);
  for (int s = 0; s < 200; ++s) {
    for (int d = 0; d < u_set.dim; ++d) u[d] = u_set.lower[d] + (u_set.upper[d] - u_set.lower[d]) * unit(rng);
    const double f0 = problem.constraint.value(x, u);
    for (int d = 0; d < u_set.dim; ++d) {
      const double step = 1e-5 * std::max(1.0, u_set.upper[d] - u_set.lower[d]);
      Vector up = u;
      up[d] = std::min(u_set.upper[d], u[d] + step);
      if (up[d] == u[d]) continue;
      slope = std::max(slope, std::abs(problem.constraint.value(x, up) - f0) / (up[d] - u[d]));
    }
  }
  return slope * h * std::sqrt(static_cast<double>(u_set.dim));
}

double feasibility_bound(long iterations, double diameter) {
  if (iterations < 2) throw std::invalid_argument("feasibility bound needs K >= 2");
  return 2.0 * diameter * kLn2 / (kTailFactor * std::sqrt(static_cast<double>(iterations)));
}

double inner_cap(long k, const SipProblem& problem, const SolverConfig& config) {
  return inner_step_cap(k, problem, StepRules::make(config, problem));
}

double horizon_inner_cap(const SipProblem& problem, const SolverConfig& config) {
  const double lg = problem.constraint.grad_bound;
  const double lf = problem.objective_grad_bound();
  const double g0 = problem.constraint.level_grad_floor;
  const double d = problem.domain.diameter();
  const double c_g = config.step_scale, c_e = config.tol_scale;
  const double radius_scale = c_g * d * lf + c_e / g0;
  return 2.0 * lg * lg * radius_scale * radius_scale / (c_e * c_e);
}

namespace {

// q_k = 2 gamma_k L_F + eps_k / G0, the per-round movement bound used in b_k.
double movement_bound(long k, const StepRules& rules, double lf, double g0) {
  return 2.0 * rules.gamma(k) * lf + rules.eps(k) / g0;
}

}  // namespace

std::vector<double> consensus_bound_sequence(long k_max, const TimeVaryingGraph& graph,
                                             const SipProblem& problem, const SolverConfig& config,
                                             double initial_norm_sum) {
  const StepRules rules = StepRules::make(config, problem);
  const auto tc = graph.transition_constants();
  const double v = static_cast<double>(graph.size());
  const double lf = problem.objective_grad_bound();
  const double g0 = problem.constraint.level_grad_floor;

  std::vector<double> out(static_cast<std::size_t>(k_max));
  double history = 0.0;  // sum_{s=1}^{k-1} beta^(k-s-1) q_s
  double init_decay = 1.0;  // beta^(k-1)
  for (long k = 1; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k - 1)] = v * tc.gamma * history + tc.gamma * init_decay * initial_norm_sum +
                                           2.0 * movement_bound(k, rules, lf, g0);
    history = tc.beta * history + movement_bound(k, rules, lf, g0);
    init_decay *= tc.beta;
  }
  return out;
}

double consensus_bound(long k, const TimeVaryingGraph& graph, const SipProblem& problem,
                       const SolverConfig& config, double initial_norm_sum) {
  if (k < 1) throw std::invalid_argument("consensus bound needs k >= 1");
  return consensus_bound_sequence(k, graph, problem, config, initial_norm_sum).back();
}

double suboptimality_constant(const SipProblem& problem, const TimeVaryingGraph& graph,
                              const SolverConfig& config, double initial_norm_sum) {
  const auto tc = graph.transition_constants();
  const double v = static_cast<double>(graph.size());
  const double lf = problem.objective_grad_bound();
  const double l = problem.combined_grad_bound();
  const double g0 = problem.constraint.level_grad_floor;
  const double d = problem.domain.diameter();
  const double c_g = config.step_scale, c_e = config.tol_scale;
  const double one_minus_beta = 1.0 - tc.beta;

  // sum_{k in T} gamma_k >= this; every term below is divided by it.
  const double tail_step_sum = c_g * d * kTailFactor;  // times sqrt(K), folded into C1/sqrt(K)

  // A: projected-subgradient term
  const double eps_plus = c_e + c_g * d * lf * g0;
  const double term_a = v * (d / 2.0 + l * l * (c_g * c_g * d * d + eps_plus * eps_plus / std::pow(g0, 4)) * kLn2);

  // C = E + F + G: consensus terms; D-term equals G/2
  const double move = 2.0 * c_g * d * lf + c_e / g0;
  const double term_e = v * tc.gamma * c_g * d * move * (1.0 / one_minus_beta) * (1.0 / one_minus_beta + 2.0 * kLn2);
  const double term_f = tc.gamma * c_g * d / one_minus_beta * initial_norm_sum;
  const double term_g = 4.0 * c_g * d * move * kLn2;
  const double term_d = term_g / 2.0;

  return (term_a + 2.0 * lf * v * (term_e + term_f + term_g) + lf * v * term_d) / tail_step_sum;
}

BoundReport make_bound_report(const SipProblem& problem, const TimeVaryingGraph& graph,
                              const SolverConfig& config, double initial_norm_sum) {
  BoundReport r;
  const auto tc = graph.transition_constants();
  r.iterations = config.iterations;
  r.diameter = problem.domain.diameter();
  r.l_f = problem.objective_grad_bound();
  r.l_g = problem.constraint.grad_bound;
  r.l_combined = problem.combined_grad_bound();
  r.g0 = problem.constraint.level_grad_floor;
  r.horizon_cap = horizon_inner_cap(problem, config);
  r.round1_cap = inner_cap(1, problem, config);
  r.feasibility = feasibility_bound(config.iterations, r.diameter);
  r.transition_gamma = tc.gamma;
  r.transition_beta = tc.beta;
  r.final_consensus_bound = consensus_bound(config.iterations, graph, problem, config, initial_norm_sum);
  r.c1 = suboptimality_constant(problem, graph, config, initial_norm_sum);
  r.c1_over_sqrt_k = r.c1 / std::sqrt(static_cast<double>(config.iterations));
  return r;
}

std::string BoundReport::to_text() const {
  std::ostringstream out;
  out << "bound report (K = " << iterations << ")\n"
      << "  domain diameter D:          " << diameter << "\n"
      << "  L_F / L_G / L:              " << l_f << " / " << l_g << " / " << l_combined << "\n"
      << "  G0:                         " << g0 << "\n"
      << "  inner cap (round 1):        " << round1_cap << "\n"
      << "  inner cap (horizon-free):   " << horizon_cap << "\n"
      << "  feasibility bound:          " << feasibility << "\n"
      << "  transition Gamma / beta:    " << transition_gamma << " / " << transition_beta << "\n"
      << "  consensus bound b_K:        " << final_consensus_bound << "\n"
      << "  suboptimality C1:           " << c1 << "\n"
      << "  suboptimality C1/sqrt(K):   " << c1_over_sqrt_k << "\n";
  return out.str();
}

ReferenceResult centralized_reference_grid(const SipProblem& problem, int points_per_dim) {
  const int n = problem.dim();
  if (n > 4) throw std::invalid_argument("grid reference supports dimension <= 4; use algorithm mode");
  if (problem.domain.kind != DomainSet::Kind::Box)
    throw std::invalid_argument("grid reference requires a box domain");
  if (points_per_dim < 2) throw std::invalid_argument("grid reference needs >= 2 points per dimension");

  const Vector& lo = problem.domain.lower;
  const Vector& hi = problem.domain.upper;
  Vector x(n), best_x(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n, 0);
  const long total = static_cast<long>(std::pow(points_per_dim, n));
  for (long it = 0; it < total; ++it) {
    for (int d = 0; d < n; ++d) x[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (points_per_dim - 1);
    if (inner_maximize(problem.constraint, x).value <= 0.0) {
      const double val = problem.total_objective(x);
      if (val < best) {
        best = val;
        best_x = x;
      }
    }
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < points_per_dim) break;
      idx[d] = 0;
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("grid reference found no feasible lattice point");
  return {best_x, best};
}

ReferenceResult centralized_reference_algorithm(const SipProblem& problem, long iterations,
                                                std::uint64_t seed) {
  // collapse to a single node minimizing the mean objective: same minimizer
  // as the sum, and the gradient scale matches a per-node objective so the
  // distributed step rule behaves like the network-average dynamics
  SipProblem single = problem;
  single.objectives.clear();
  LocalObjective mean;
  auto objectives = std::make_shared<std::vector<LocalObjective>>(problem.objectives);
  const int dim = problem.dim();
  const double inv_v = 1.0 / static_cast<double>(problem.node_count());
  mean.value = [objectives, inv_v](const Vector& x) {
    double v = 0.0;
    for (const auto& o : *objectives) v += o.value(x);
    return inv_v * v;
  };
  mean.subgradient = [objectives, dim, inv_v](const Vector& x) {
    Vector g = Vector::Zero(dim);
    for (const auto& o : *objectives) g += o.subgradient(x);
    return Vector(inv_v * g);
  };
  for (const auto& o : *objectives) mean.grad_bound += inv_v * o.grad_bound;
  single.objectives.push_back(std::move(mean));

  GraphSpec gs;
  gs.kind = GraphKind::StaticCycle;
  gs.nodes = 1;
  gs.window = 1;
  const TimeVaryingGraph graph = TimeVaryingGraph::make(gs);

  SolverConfig config;
  config.iterations = iterations;
  config.seed = seed;
  config.record_timing = false;
  const RunResult res = run(single, graph, config);
  return {res.averages.front(), problem.total_objective(res.averages.front())};
}

CertificationReport metacontrol_certify(const MetaControlModel& model, const Vector& u,
                                        long samples, std::uint64_t seed, double tolerance) {
  CertificationReport report;
  report.threshold = model.terminal_bound + tolerance;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(model.w_lo, model.w_hi);
  for (long s = 0; s < samples; ++s) {
    CertificationSample sample;
    sample.index = s;
    sample.w = draw(rng);
    sample.terminal_norm_sq = model.terminal_state(u, sample.w).squaredNorm();
    sample.pass = sample.terminal_norm_sq <= report.threshold;
    report.max_terminal_norm_sq = std::max(report.max_terminal_norm_sq, sample.terminal_norm_sq);
    report.passed = report.passed && sample.pass;
    report.samples.push_back(sample);
  }
  return report;
}

void CertificationReport::write_csv(std::ostream& out) const {
  out << "sample_index,w,terminal_norm_sq,pass\n";
  char buf[128];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%d\n", s.index, s.w, s.terminal_norm_sq, s.pass ? 1 : 0);
    out << buf;
  }
}

G0Estimate estimate_g0(const SipProblem& problem, long samples, double delta, std::uint64_t seed) {
  G0Estimate est;
  est.min_grad_norm = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& dom = problem.domain;
  for (long s = 0; s < samples; ++s) {
    Vector x(dom.dim);
    if (dom.kind == DomainSet::Kind::Box) {
      for (int d = 0; d < dom.dim; ++d) x[d] = dom.lower[d] + (dom.upper[d] - dom.lower[d]) * unit(rng);
    } else {
      for (int d = 0; d < dom.dim; ++d) x[d] = dom.center[d] + dom.radius * (2.0 * unit(rng) - 1.0);
      x = dom.project(x);
    }
    const MaxResult m = inner_maximize(problem.constraint, x);
    if (std::abs(m.value) > delta) continue;
    est.min_grad_norm = std::min(est.min_grad_norm, problem.constraint.grad_x(x, m.point).norm());
    ++est.points_used;
  }
  if (est.points_used == 0) est.min_grad_norm = 0.0;
  return est;
}

}  // namespace sip
