#include "sip/csv.hpp"

#include <cstdio>
#include <ostream>

namespace sip {

namespace {

void append_double(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += buf;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::string& run_id, const std::string& method,
                       const RunMetrics& metrics, bool with_header) {
  if (with_header) out << kMetricsHeader << '\n';
  std::string line;
  for (const auto& r : metrics.records) {
    line.clear();
    line += run_id;
    line += ',';
    line += method;
    line += ',';
    line += std::to_string(r.k);
    line += ',';
    line += std::to_string(r.node);
    line += ',';
    append_double(line, r.objective);
    line += ',';
    append_double(line, r.violation);
    line += ',';
    append_double(line, r.consensus_err);
    line += ',';
    line += std::to_string(r.inner_steps);
    line += ',';
    line += std::to_string(r.node_round_ns);
    line += '\n';
    out << line;
  }
}

std::vector<ComparisonRow> comparison_rows(const std::string& method, const RunMetrics& metrics) {
  std::vector<ComparisonRow> rows;
  rows.reserve(metrics.round_averages.size());
  double ns_running = 0.0;
  for (const auto& ra : metrics.round_averages) {
    ns_running += ra.mean_node_ns;
    ComparisonRow row;
    row.method = method;
    row.k = ra.k;
    row.objective_at_avg = ra.objective_at_avg;
    row.true_violation = ra.violation_at_avg;
    row.cum_avg_iter_ns = ns_running / static_cast<double>(ra.k);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::string& run_id,
                          const std::vector<ComparisonRow>& rows) {
  out << "run_id,method,k,objective_at_avg,true_violation,cum_avg_iter_ns\n";
  std::string line;
  for (const auto& r : rows) {
    line.clear();
    line += run_id;
    line += ',';
    line += r.method;
    line += ',';
    line += std::to_string(r.k);
    line += ',';
    append_double(line, r.objective_at_avg);
    line += ',';
    append_double(line, r.true_violation);
    line += ',';
    append_double(line, r.cum_avg_iter_ns);
    line += '\n';
    out << line;
  }
}

}  // namespace sip
