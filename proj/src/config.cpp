#include "sip/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sip {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError(field + ": " + why);
}

const json* find(const json& block, const char* key) {
  const auto it = block.find(key);
  return it == block.end() ? nullptr : &*it;
}

template <typename T>
void read_field(const json& block, const std::string& prefix, const char* key, T& out) {
  const json* v = find(block, key);
  if (!v) return;
  try {
    out = v->get<T>();
  } catch (const json::exception&) {
    fail(prefix + key, "wrong type");
  }
}

void require_object(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "must be an object");
}

void check_known_keys(const json& block, const std::string& prefix,
                      std::initializer_list<const char*> known) {
  for (const auto& item : block.items()) {
    bool ok = false;
    for (const char* k : known)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(prefix + item.key(), "unknown field");
  }
}

ProblemConfig parse_problem(const json& block) {
  require_object(block, "problem");
  check_known_keys(block, "problem.",
                   {"name", "g0", "l_f", "l_g", "u_max", "grid_points_m1", "grid_points_m2",
                    "scenario_count", "scenario_seed"});
  ProblemConfig p;
  read_field(block, "problem.", "name", p.name);
  if (p.name != "quad_abs_10" && p.name != "meta_control" && p.name != "finite_demo")
    fail("problem.name", "unknown problem '" + p.name + "'");
  if (find(block, "g0")) {
    double g0 = 0.0;
    read_field(block, "problem.", "g0", g0);
    if (!(g0 > 0.0)) fail("problem.g0", "must be positive");
    p.params.g0 = g0;
  }
  if (find(block, "l_f")) {
    double lf = 0.0;
    read_field(block, "problem.", "l_f", lf);
    if (!(lf > 0.0)) fail("problem.l_f", "must be positive");
    p.params.l_f = lf;
  }
  if (find(block, "l_g")) {
    double lg = 0.0;
    read_field(block, "problem.", "l_g", lg);
    if (!(lg > 0.0)) fail("problem.l_g", "must be positive");
    p.params.l_g = lg;
  }
  read_field(block, "problem.", "u_max", p.params.u_max);
  if (!(p.params.u_max > 0.0)) fail("problem.u_max", "must be positive");
  read_field(block, "problem.", "grid_points_m1", p.params.grid_points_m1);
  read_field(block, "problem.", "grid_points_m2", p.params.grid_points_m2);
  if (p.params.grid_points_m1 < 2) fail("problem.grid_points_m1", "needs at least 2 points");
  if (p.params.grid_points_m2 < 2) fail("problem.grid_points_m2", "needs at least 2 points");
  read_field(block, "problem.", "scenario_count", p.params.scenario_count);
  if (p.params.scenario_count < 1) fail("problem.scenario_count", "must be positive");
  read_field(block, "problem.", "scenario_seed", p.params.scenario_seed);
  return p;
}

GraphSpec parse_graph(const json& block) {
  require_object(block, "graph");
  check_known_keys(block, "graph.", {"kind", "nodes", "window", "self_weight", "seed"});
  GraphSpec g;
  std::string kind = "static-cycle";
  read_field(block, "graph.", "kind", kind);
  try {
    g.kind = graph_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    fail("graph.kind", e.what());
  }
  read_field(block, "graph.", "nodes", g.nodes);
  if (g.nodes < 1) fail("graph.nodes", "must be a positive node count");
  read_field(block, "graph.", "window", g.window);
  if (g.window < 1) fail("graph.window", "must be a positive round count");
  read_field(block, "graph.", "self_weight", g.self_weight);
  if (!(g.self_weight > 0.0 && g.self_weight < 1.0)) fail("graph.self_weight", "must lie in (0,1)");
  read_field(block, "graph.", "seed", g.seed);
  return g;
}

SolverConfig parse_solver(const json& block) {
  require_object(block, "solver");
  check_known_keys(block, "solver.",
                   {"iterations", "step_scale", "tol_scale", "inner_cap", "initial_repair", "seed",
                    "threads", "record_timing"});
  SolverConfig s;
  read_field(block, "solver.", "iterations", s.iterations);
  if (s.iterations < 2) fail("solver.iterations", "needs at least 2 rounds");
  read_field(block, "solver.", "step_scale", s.step_scale);
  if (!(s.step_scale > 0.0)) fail("solver.step_scale", "must be positive");
  read_field(block, "solver.", "tol_scale", s.tol_scale);
  if (!(s.tol_scale > 0.0)) fail("solver.tol_scale", "must be positive");
  read_field(block, "solver.", "inner_cap", s.inner_cap);
  if (s.inner_cap < 0) fail("solver.inner_cap", "must be nonnegative (0 selects the default)");
  read_field(block, "solver.", "initial_repair", s.initial_repair);
  read_field(block, "solver.", "seed", s.seed);
  read_field(block, "solver.", "threads", s.threads);
  if (s.threads < 1) fail("solver.threads", "must be at least 1");
  read_field(block, "solver.", "record_timing", s.record_timing);
  return s;
}

BaselineConfig parse_baseline(const json& block) {
  require_object(block, "baseline");
  check_known_keys(block, "baseline.", {"scenario_counts", "seed"});
  BaselineConfig b;
  read_field(block, "baseline.", "scenario_counts", b.scenario_counts);
  if (b.scenario_counts.empty()) fail("baseline.scenario_counts", "needs at least one entry");
  for (long n : b.scenario_counts)
    if (n < 1) fail("baseline.scenario_counts", "entries must be positive");
  read_field(block, "baseline.", "seed", b.seed);
  return b;
}

AnalysisConfig parse_analysis(const json& block) {
  require_object(block, "analysis");
  check_known_keys(block, "analysis.",
                   {"oracle_points", "certification_samples", "certification_seed",
                    "reference_mode", "reference_points", "reference_iterations",
                    "validation_horizon", "g0_estimator_samples", "g0_estimator_delta"});
  AnalysisConfig a;
  read_field(block, "analysis.", "oracle_points", a.oracle_points);
  if (a.oracle_points < 0) fail("analysis.oracle_points", "must be nonnegative");
  read_field(block, "analysis.", "certification_samples", a.certification_samples);
  if (a.certification_samples < 1) fail("analysis.certification_samples", "must be positive");
  read_field(block, "analysis.", "certification_seed", a.certification_seed);
  read_field(block, "analysis.", "reference_mode", a.reference_mode);
  if (a.reference_mode != "grid" && a.reference_mode != "algorithm")
    fail("analysis.reference_mode", "must be 'grid' or 'algorithm'");
  read_field(block, "analysis.", "reference_points", a.reference_points);
  if (a.reference_points < 2) fail("analysis.reference_points", "needs at least 2 points");
  read_field(block, "analysis.", "reference_iterations", a.reference_iterations);
  if (a.reference_iterations < 2) fail("analysis.reference_iterations", "needs at least 2 rounds");
  read_field(block, "analysis.", "validation_horizon", a.validation_horizon);
  if (a.validation_horizon < 1) fail("analysis.validation_horizon", "must be positive");
  read_field(block, "analysis.", "g0_estimator_samples", a.g0_estimator_samples);
  if (a.g0_estimator_samples < 1) fail("analysis.g0_estimator_samples", "must be positive");
  read_field(block, "analysis.", "g0_estimator_delta", a.g0_estimator_delta);
  if (!(a.g0_estimator_delta > 0.0)) fail("analysis.g0_estimator_delta", "must be positive");
  return a;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("top level: must be an object");
  check_known_keys(root, "",
                   {"run_id", "output_dir", "problem", "graph", "solver", "baseline", "analysis"});

  ExperimentConfig cfg;
  read_field(root, "", "run_id", cfg.run_id);
  if (cfg.run_id.empty()) throw ConfigError("run_id: must be nonempty");
  read_field(root, "", "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir: must be nonempty");

  if (const json* v = find(root, "problem")) cfg.problem = parse_problem(*v);
  if (const json* v = find(root, "graph")) cfg.graph = parse_graph(*v);
  if (cfg.graph.nodes == 0) throw ConfigError("graph.nodes: required");
  if (const json* v = find(root, "solver")) cfg.solver = parse_solver(*v);
  if (const json* v = find(root, "baseline")) cfg.baseline = parse_baseline(*v);
  if (const json* v = find(root, "analysis")) cfg.analysis = parse_analysis(*v);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace sip
