#include "sip/analysis.hpp"
#include "sip/baseline.hpp"
#include "sip/catalog.hpp"
#include "sip/config.hpp"
#include "sip/csv.hpp"
#include "sip/graph.hpp"
#include "sip/solver.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace sip;

struct CliOptions {
  std::string config_path;
  std::string out_dir;  // overrides config output_dir when nonempty
  std::optional<std::uint64_t> seed;
  std::string control_path;  // certify only
  bool quiet = false;
};

struct Session {
  ExperimentConfig cfg;
  CatalogProblem catalog;
  TimeVaryingGraph graph;
  fs::path out;
  bool quiet = false;

  void say(const std::string& line) const {
    if (!quiet) std::cout << line << '\n';
  }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Session open_session(const CliOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.seed) cfg.solver.seed = *opt.seed;
  CatalogProblem catalog = catalog_build(cfg.problem.name, cfg.problem.params);
  if (cfg.graph.nodes != catalog.problem.node_count())
    throw ConfigError("graph.nodes: must equal the problem's node count (" +
                      std::to_string(catalog.problem.node_count()) + ")");
  TimeVaryingGraph graph = TimeVaryingGraph::make(cfg.graph);
  fs::path out(cfg.output_dir);
  fs::create_directories(out);
  return Session{std::move(cfg), std::move(catalog), std::move(graph), std::move(out), opt.quiet};
}

ViolationOracle make_oracle(const Session& s) {
  if (s.cfg.analysis.oracle_points <= 0) return {};
  const SipProblem* p = &s.catalog.problem;
  const int points = s.cfg.analysis.oracle_points;
  return [p, points](const Vector& x) { return violation_oracle(*p, x, points); };
}

void write_control_file(const fs::path& path, const Vector& u) {
  std::ofstream out(path);
  for (Eigen::Index t = 0; t < u.size(); ++t) out << format_double(u[t]) << '\n';
}

Vector read_control_file(const std::string& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("control file: cannot open '" + path + "'");
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (static_cast<int>(values.size()) != expected_dim)
    throw ConfigError("control file: expected " + std::to_string(expected_dim) + " values, got " +
                      std::to_string(values.size()));
  Vector u(expected_dim);
  for (int t = 0; t < expected_dim; ++t) u[t] = values[static_cast<std::size_t>(t)];
  return u;
}

void write_summary(const Session& s, const RunResult& res, const fs::path& path) {
  const SipProblem& problem = s.catalog.problem;
  std::ofstream out(path);
  out << "run " << s.cfg.run_id << ": problem " << problem.name << ", graph "
      << to_string(s.cfg.graph.kind) << " V=" << s.graph.size() << ", K=" << s.cfg.solver.iterations
      << "\n\n";
  out << "per-node returned averages:\n";
  for (int i = 0; i < problem.node_count(); ++i) {
    const Vector& x = res.averages[static_cast<std::size_t>(i)];
    out << "  node " << i << ": objective " << format_double(problem.total_objective(x))
        << ", violation " << format_double(violation_oracle(problem, x)) << "\n";
  }
  const auto& final_round = res.metrics.records;
  double final_consensus = 0.0;
  const std::size_t v = static_cast<std::size_t>(problem.node_count());
  for (std::size_t i = final_round.size() - v; i < final_round.size(); ++i)
    final_consensus = std::max(final_consensus, final_round[i].consensus_err);
  out << "\nfinal-round max consensus error: " << format_double(final_consensus) << "\n";
  out << "max inner steps in any round:    " << res.metrics.max_inner_steps << "\n";
  out << "initial estimate norm sum:       " << format_double(res.metrics.initial_norm_sum) << "\n";
}

int cmd_run(const CliOptions& opt) {
  Session s = open_session(opt);
  const RunResult res = run(s.catalog.problem, s.graph, s.cfg.solver, make_oracle(s));

  {
    std::ofstream csv(s.out / "run.csv");
    write_metrics_csv(csv, s.cfg.run_id, "dagd", res.metrics);
    if (s.cfg.baseline) {
      for (long n : s.cfg.baseline->scenario_counts) {
        const ScenarioSet scen =
            sample_scenarios(s.catalog.problem.constraint.index_set, n, s.cfg.baseline->seed);
        const RunResult bres =
            run_scenario_baseline(s.catalog.problem, s.graph, s.cfg.solver, scen, make_oracle(s));
        write_metrics_csv(csv, s.cfg.run_id, "scenario_" + std::to_string(n), bres.metrics, false);
      }
    }
  }
  {
    std::ofstream bounds(s.out / "bounds.txt");
    bounds << make_bound_report(s.catalog.problem, s.graph, s.cfg.solver,
                                res.metrics.initial_norm_sum)
                  .to_text();
  }
  write_summary(s, res, s.out / "summary.txt");

  if (s.catalog.meta) {
    const Vector& u = res.averages.front();
    write_control_file(s.out / "control.txt", u);
    const double tol =
        feasibility_bound(s.cfg.solver.iterations, s.catalog.problem.domain.diameter());
    const CertificationReport report =
        metacontrol_certify(*s.catalog.meta, u, s.cfg.analysis.certification_samples,
                            s.cfg.analysis.certification_seed, tol);
    std::ofstream cert(s.out / "certification.csv");
    report.write_csv(cert);
    s.say(std::string("certification: ") + (report.passed ? "all samples pass" : "FAILED") +
          ", max terminal norm^2 " + format_double(report.max_terminal_norm_sq) + " vs threshold " +
          format_double(report.threshold));
  }

  s.say("wrote " + (s.out / "run.csv").string() + ", bounds.txt, summary.txt");
  return 0;
}

int cmd_validate(const CliOptions& opt) {
  Session s = open_session(opt);
  const SipProblem& problem = s.catalog.problem;
  bool ok = true;

  const GraphValidationReport graph_report = validate_graph(s.graph, s.cfg.analysis.validation_horizon);
  s.say(graph_report.summary());
  {
    std::ofstream csv(s.out / "graph_validation.csv");
    graph_report.write_csv(csv);
  }
  ok = ok && graph_report.passed;

  // oracle spot checks: subgradient inequality (convexity certificate) and
  // finite-difference agreement at sampled points
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample_x = [&]() {
    Vector x(problem.dim());
    const auto& dom = problem.domain;
    for (int d = 0; d < problem.dim(); ++d)
      x[d] = dom.kind == DomainSet::Kind::Box
                 ? dom.lower[d] + (dom.upper[d] - dom.lower[d]) * unit(rng)
                 : dom.center[d] + dom.radius * (2.0 * unit(rng) - 1.0);
    return dom.project(x);
  };
  int convexity_failures = 0, bound_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = sample_x(), b = sample_x();
    for (const auto& obj : problem.objectives) {
      const Vector g = obj.subgradient(a);
      if (obj.value(b) < obj.value(a) + g.dot(b - a) - 1e-7) ++convexity_failures;
      if (g.norm() > obj.grad_bound * (1.0 + 1e-9)) ++bound_failures;
    }
  }
  s.say("objective spot checks: " + std::to_string(convexity_failures) + " convexity failures, " +
        std::to_string(bound_failures) + " gradient-bound failures over 50 samples");
  ok = ok && convexity_failures == 0 && bound_failures == 0;

  const G0Estimate g0 = estimate_g0(problem, s.cfg.analysis.g0_estimator_samples,
                                    s.cfg.analysis.g0_estimator_delta, 42);
  s.say("G0 diagnostic: configured " + format_double(problem.constraint.level_grad_floor) +
        ", sampled minimum gradient norm " + format_double(g0.min_grad_norm) + " over " +
        std::to_string(g0.points_used) + " near-boundary points");
  if (g0.points_used > 0 && g0.min_grad_norm < problem.constraint.level_grad_floor) {
    s.say("WARNING: configured G0 exceeds the sampled minimum; inner-loop guarantees may not hold");
    ok = false;
  }

  s.say(ok ? "validation passed" : "validation FAILED");
  return ok ? 0 : 1;
}

int cmd_compare(const CliOptions& opt) {
  Session s = open_session(opt);
  if (!s.cfg.baseline) throw ConfigError("baseline: block required for compare");

  std::vector<ComparisonRow> all;
  {
    const RunResult res = run(s.catalog.problem, s.graph, s.cfg.solver, make_oracle(s));
    auto rows = comparison_rows("dagd", res.metrics);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  for (long n : s.cfg.baseline->scenario_counts) {
    const ScenarioSet scen =
        sample_scenarios(s.catalog.problem.constraint.index_set, n, s.cfg.baseline->seed);
    const RunResult res =
        run_scenario_baseline(s.catalog.problem, s.graph, s.cfg.solver, scen, make_oracle(s));
    auto rows = comparison_rows("scenario_" + std::to_string(n), res.metrics);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  std::ofstream csv(s.out / "comparison.csv");
  write_comparison_csv(csv, s.cfg.run_id, all);
  s.say("wrote " + (s.out / "comparison.csv").string());
  return 0;
}

int cmd_reference(const CliOptions& opt) {
  Session s = open_session(opt);
  ReferenceResult ref;
  if (s.cfg.analysis.reference_mode == "grid") {
    if (s.catalog.problem.dim() > 4)
      throw ConfigError(
          "analysis.reference_mode: grid mode supports dimension <= 4; set \"algorithm\"");
    ref = centralized_reference_grid(s.catalog.problem, s.cfg.analysis.reference_points);
  } else {
    ref = centralized_reference_algorithm(s.catalog.problem, s.cfg.analysis.reference_iterations,
                                          s.cfg.solver.seed);
  }
  std::ofstream out(s.out / "reference.txt");
  out << "mode " << s.cfg.analysis.reference_mode << "\n";
  out << "value " << format_double(ref.value) << "\n";
  for (Eigen::Index d = 0; d < ref.x.size(); ++d) out << "x" << d << " " << format_double(ref.x[d]) << "\n";
  s.say("reference value " + format_double(ref.value));
  return 0;
}

int cmd_certify(const CliOptions& opt) {
  Session s = open_session(opt);
  if (!s.catalog.meta) throw ConfigError("problem.name: certify requires the meta-control problem");
  if (opt.control_path.empty()) throw ConfigError("control file: path required (positional argument)");
  const Vector u = read_control_file(opt.control_path, s.catalog.problem.dim());
  const double tol = feasibility_bound(s.cfg.solver.iterations, s.catalog.problem.domain.diameter());
  const CertificationReport report =
      metacontrol_certify(*s.catalog.meta, u, s.cfg.analysis.certification_samples,
                          s.cfg.analysis.certification_seed, tol);
  std::ofstream csv(s.out / "certification.csv");
  report.write_csv(csv);
  s.say(std::string("certification: ") + (report.passed ? "all samples pass" : "FAILED") +
        ", max terminal norm^2 " + format_double(report.max_terminal_norm_sq) + " vs threshold " +
        format_double(report.threshold));
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed semi-infinite convex optimization experiment runner"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "experiment config file (JSON)")->required();
  app.add_option("--out", opt.out_dir, "output directory (overrides config)");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "solver seed (overrides config)");
  app.add_flag("--quiet", opt.quiet, "suppress progress output");

  auto* sub_run = app.add_subcommand("run", "solve and emit metrics, bounds, summary");
  auto* sub_validate = app.add_subcommand("validate", "graph and oracle diagnostics, no solve");
  auto* sub_compare = app.add_subcommand("compare", "main method vs scenario baselines");
  auto* sub_reference = app.add_subcommand("reference", "centralized reference solution");
  auto* sub_certify = app.add_subcommand("certify", "certify a stored control vector");
  sub_certify->add_option("control", opt.control_path, "control vector file, one value per line");

  CLI11_PARSE(app, argc, argv);
  if (!seed_opt->empty()) opt.seed = seed_value;

  try {
    if (sub_run->parsed()) return cmd_run(opt);
    if (sub_validate->parsed()) return cmd_validate(opt);
    if (sub_compare->parsed()) return cmd_compare(opt);
    if (sub_reference->parsed()) return cmd_reference(opt);
    if (sub_certify->parsed()) return cmd_certify(opt);
  } catch (const sip::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const sip::SolverError& e) {
    std::cerr << "runtime error at round " << e.round() << ", node " << e.node() << ": " << e.what()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
