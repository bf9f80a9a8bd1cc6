#ifndef SIP_CSV_HPP
#define SIP_CSV_HPP

#include "sip/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sip {

inline constexpr const char* kMetricsHeader =
    "run_id,method,k,node,objective,violation,consensus_err,inner_steps,node_round_ns";

/// Row-per-(round,node) metric stream; floats at 17 significant digits so the
/// values round-trip exactly.
void write_metrics_csv(std::ostream& out, const std::string& run_id, const std::string& method,
                       const RunMetrics& metrics, bool with_header = true);

struct ComparisonRow {
  std::string method;
  long k = 0;
  double objective_at_avg = 0.0;
  double true_violation = 0.0;
  double cum_avg_iter_ns = 0.0;  // k^-1 * sum_{s<=k} mean node time of round s
};

void write_comparison_csv(std::ostream& out, const std::string& run_id,
                          const std::vector<ComparisonRow>& rows);

/// Per-method cumulative average per-iteration time series from round means.
std::vector<ComparisonRow> comparison_rows(const std::string& method, const RunMetrics& metrics);

}  // namespace sip

#endif  // SIP_CSV_HPP
