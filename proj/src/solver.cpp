#include "sip/solver.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

namespace sip {

namespace {

constexpr double kDegenerateGradSq = 1e-18;

MaxResult node_maximize(const SipProblem& problem, const Vector& x,
                        const std::vector<Vector>* scenario_subset) {
  if (scenario_subset) return finite_maximize(problem.constraint, x, *scenario_subset);
  return inner_maximize(problem.constraint, x);
}

long resolve_cap(const SolverConfig& config, const SipProblem& problem, const StepRules& rules) {
  if (config.inner_cap > 0) return config.inner_cap;
  // Prop-style cap assumes an exact inner maximizer; grid error needs headroom.
  const double cap = 10.0 * inner_step_cap(1, problem, rules);
  return static_cast<long>(std::ceil(std::min(cap, 1e18)));
}

}  // namespace

StepRules StepRules::make(const SolverConfig& config, const SipProblem& problem) {
  if (config.iterations < 2) throw std::invalid_argument("solver needs at least 2 iterations");
  if (!(config.step_scale > 0.0) || !(config.tol_scale > 0.0))
    throw std::invalid_argument("step_scale and tol_scale must be positive");
  return {config.step_scale * problem.domain.diameter(), config.tol_scale};
}

Vector mix(const Eigen::RowVectorXd& weights, const std::vector<Vector>& estimates) {
  if (weights.size() != static_cast<Eigen::Index>(estimates.size()))
    throw std::logic_error("mix: weight row and estimate count disagree");
  Vector v = Vector::Zero(estimates.front().size());
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (weights[j] != 0.0) v += weights[j] * estimates[static_cast<std::size_t>(j)];
  return v;
}

Vector outer_step(const Vector& v, const Vector& g, double gamma, const DomainSet& domain) {
  return domain.project(v - gamma * g);
}

Vector ball_project(const Vector& center, double radius, const Vector& p) {
  const Vector d = p - center;
  const double n = d.norm();
  if (n <= radius) return p;
  return center + (radius / n) * d;
}

double polyak_step(double f_val, double grad_norm_sq) {
  if (grad_norm_sq <= kDegenerateGradSq)
    throw std::runtime_error("degenerate constraint gradient in Polyak step (G0 assumption violated at this iterate)");
  return f_val / grad_norm_sq;
}

double inner_step_cap(long k, const SipProblem& problem, const StepRules& rules) {
  const double lg = problem.constraint.grad_bound;
  const double lf = problem.objective_grad_bound();
  const double g0 = problem.constraint.level_grad_floor;
  const double eps_next = rules.eps(k + 1);
  const double radius = rules.gamma(k) * lf + rules.eps(k) / g0;
  return lg * lg / (eps_next * eps_next) * radius * radius;
}

InnerResult inner_descent(const Vector& z, long k, const SipProblem& problem,
                          const StepRules& rules, long cap,
                          const std::vector<Vector>* scenario_subset) {
  const bool repair = k < 1;  // pre-round feasibility repair: ball replaced by X
  const double eps_next = repair ? rules.eps(1) : rules.eps(k + 1);
  const double radius = repair ? 0.0 : rules.gamma(k) * problem.objective_grad_bound() +
                                           rules.eps(k) / problem.constraint.level_grad_floor;

  InnerResult out{z, 0};
  MaxResult m = node_maximize(problem, out.x, scenario_subset);
  while (m.value > eps_next) {
    if (out.steps >= cap)
      throw SolverError(
          "inner descent cap exceeded (probable causes: configured G0 too large, L_F too small, "
          "or under-resolved constraint maximizer)",
          k, -1);
    const Vector g = problem.constraint.grad_x(out.x, m.point);
    const double lambda = polyak_step(m.value, g.squaredNorm());
    Vector candidate = out.x - lambda * g;
    if (!repair) candidate = ball_project(z, radius, candidate);
    out.x = problem.domain.project(candidate);
    m = node_maximize(problem, out.x, scenario_subset);
    ++out.steps;
  }
  return out;
}

std::vector<Vector> initial_estimates(const SipProblem& problem, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const auto& dom = problem.domain;
  for (int i = 0; i < count; ++i) {
    Vector x(dom.dim);
    if (dom.kind == DomainSet::Kind::Box) {
      for (int d = 0; d < dom.dim; ++d) x[d] = dom.lower[d] + (dom.upper[d] - dom.lower[d]) * unit(rng);
    } else {
      // uniform direction, radius scaled for a uniform ball draw
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int d = 0; d < dom.dim; ++d) x[d] = gauss(rng);
      const double n = x.norm();
      const double r = dom.radius * std::pow(unit(rng), 1.0 / dom.dim);
      x = n > 0.0 ? Vector(dom.center + (r / n) * x) : dom.center;
    }
    out.push_back(std::move(x));
  }
  return out;
}

RunResult run(const SipProblem& problem, const TimeVaryingGraph& graph, const SolverConfig& config,
              const ViolationOracle& violation, const NodeScenarios* scenarios) {
  const int v_count = problem.node_count();
  if (v_count != graph.size()) throw std::invalid_argument("problem node count and graph size disagree");
  if (scenarios && static_cast<int>(scenarios->size()) != v_count)
    throw std::invalid_argument("scenario allocation must cover every node");

  const StepRules rules = StepRules::make(config, problem);
  const long cap = resolve_cap(config, problem, rules);
  const long k_max = config.iterations;
  const long tail_start = k_max / 2;  // T = {floor(K/2), ..., K}

  auto measure_violation = [&](const Vector& x) {
    if (violation) return violation(x);
    return inner_maximize(problem.constraint, x).value;
  };

  std::vector<Vector> estimates = initial_estimates(problem, v_count, config.seed);

  RunResult result;
  auto& metrics = result.metrics;
  for (const auto& x : estimates) metrics.initial_norm_sum += x.norm();
  metrics.records.reserve(static_cast<std::size_t>(k_max) * v_count);
  metrics.round_averages.reserve(static_cast<std::size_t>(k_max));

  // The analysis assumes max_u f(x_1^i, u) <= eps_1 for every node.
  for (int i = 0; i < v_count; ++i) {
    const auto subset = scenarios ? &(*scenarios)[static_cast<std::size_t>(i)] : nullptr;
    const double before = node_maximize(problem, estimates[static_cast<std::size_t>(i)], subset).value;
    if (before <= rules.eps(1)) continue;
    if (!config.initial_repair)
      throw SolverError("initial estimate violates eps_1 and initial repair is disabled", 0, i);
    estimates[static_cast<std::size_t>(i)] =
        inner_descent(estimates[static_cast<std::size_t>(i)], 0, problem, rules, cap, subset).x;
  }

  std::vector<Vector> tail_sum(static_cast<std::size_t>(v_count), Vector::Zero(problem.dim()));
  double tail_weight = 0.0;

  struct NodeOutcome {
    Vector x_next;
    long inner_steps = 0;
    long ns = 0;
    double objective = 0.0;
    double violation = 0.0;
    std::exception_ptr error;
  };
  std::vector<NodeOutcome> outcomes(static_cast<std::size_t>(v_count));

  for (long k = 1; k <= k_max; ++k) {
    const Eigen::MatrixXd weights = graph.weight_matrix(k);
    const double gamma_k = rules.gamma(k);

    auto work = [&](int i) {
      auto& slot = outcomes[static_cast<std::size_t>(i)];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const auto subset = scenarios ? &(*scenarios)[static_cast<std::size_t>(i)] : nullptr;
        const Vector mixed = mix(weights.row(i), estimates);
        const Vector g = problem.objectives[static_cast<std::size_t>(i)].subgradient(mixed);
        const Vector z = outer_step(mixed, g, gamma_k, problem.domain);
        InnerResult inner = inner_descent(z, k, problem, rules, cap, subset);
        slot.x_next = std::move(inner.x);
        slot.inner_steps = inner.steps;
        slot.objective = problem.total_objective(slot.x_next);
        slot.violation = measure_violation(slot.x_next);
        slot.ns = config.record_timing
                      ? std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count()
                      : 0;
      } catch (...) {
        slot.error = std::current_exception();
      }
    };

    if (config.threads > 1) {
      std::vector<std::thread> pool;
      const int t_count = std::min(config.threads, v_count);
      pool.reserve(static_cast<std::size_t>(t_count));
      for (int t = 0; t < t_count; ++t)
        pool.emplace_back([&, t] {
          for (int i = t; i < v_count; i += t_count) work(i);
        });
      for (auto& th : pool) th.join();
    } else {
      for (int i = 0; i < v_count; ++i) work(i);
    }

    // barrier: surface node errors, publish round k+1 estimates, then reduce
    // metrics in node order
    for (int i = 0; i < v_count; ++i) {
      const auto& slot = outcomes[static_cast<std::size_t>(i)];
      if (!slot.error) continue;
      try {
        std::rethrow_exception(slot.error);
      } catch (const SolverError& e) {
        throw SolverError(e.what(), k, i);
      } catch (const std::exception& e) {
        throw SolverError(e.what(), k, i);
      }
    }
    for (int i = 0; i < v_count; ++i) estimates[static_cast<std::size_t>(i)] = outcomes[static_cast<std::size_t>(i)].x_next;

    Vector avg = Vector::Zero(problem.dim());
    for (const auto& x : estimates) avg += x;
    avg /= static_cast<double>(v_count);

    double ns_sum = 0.0;
    for (int i = 0; i < v_count; ++i) {
      const auto& slot = outcomes[static_cast<std::size_t>(i)];
      RoundRecord rec;
      rec.k = k;
      rec.node = i;
      rec.objective = slot.objective;
      rec.violation = slot.violation;
      rec.consensus_err = (avg - estimates[static_cast<std::size_t>(i)]).norm();
      rec.inner_steps = slot.inner_steps;
      rec.node_round_ns = slot.ns;
      metrics.records.push_back(rec);
      metrics.max_inner_steps = std::max(metrics.max_inner_steps, slot.inner_steps);
      ns_sum += static_cast<double>(slot.ns);
    }

    RoundAverage ra;
    ra.k = k;
    ra.objective_at_avg = problem.total_objective(avg);
    ra.violation_at_avg = measure_violation(avg);
    ra.mean_node_ns = ns_sum / v_count;
    metrics.round_averages.push_back(ra);

    if (k >= tail_start) {
      for (int i = 0; i < v_count; ++i) tail_sum[static_cast<std::size_t>(i)] += gamma_k * estimates[static_cast<std::size_t>(i)];
      tail_weight += gamma_k;
    }
  }

  result.averages.reserve(static_cast<std::size_t>(v_count));
  for (int i = 0; i < v_count; ++i) result.averages.push_back(tail_sum[static_cast<std::size_t>(i)] / tail_weight);
  result.finals = estimates;
  return result;
}

}  // namespace sip
