#ifndef SIP_ANALYSIS_HPP
#define SIP_ANALYSIS_HPP

#include "sip/catalog.hpp"
#include "sip/graph.hpp"
#include "sip/problem.hpp"
#include "sip/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sip {

/// Verification-grid resolution: at least 4x finer per dimension than the
/// solver's own maximizer grid, or `fallback` for analytic maximizers.
int oracle_resolution(const SipProblem& problem, int fallback = 101);

/// Independent fine-grid constraint maximum, decoupled from the solver's
/// maximizer (golden refinement added for 1-D index sets).
double violation_oracle(const SipProblem& problem, const Vector& x, int points_per_dim = 0);

/// Worst-case grid gap L_u * h of the verification grid, with L_u estimated
/// by sampling the u-slope of f at x.
double oracle_grid_gap(const SipProblem& problem, const Vector& x, int points_per_dim = 0);

/// 2 D ln2 / ((2 - sqrt(2)) sqrt(K)), the guaranteed worst-case violation of
/// the returned averages.
double feasibility_bound(long iterations, double diameter);

/// Per-round inner-iteration cap L_G^2/eps_{k+1}^2 (gamma_k L_F + eps_k/G0)^2.
double inner_cap(long k, const SipProblem& problem, const SolverConfig& config);

/// Horizon-independent cap 2 L_G^2 (D L_F + 1/G0)^2 under the default rules
/// (scale factors folded in so it reduces to the plain form at scale 1).
double horizon_inner_cap(const SipProblem& problem, const SolverConfig& config);

/// Disagreement bound b_k for ||xhat_{k+1} - x_{k+1}^i||; pairwise
/// disagreement is bounded by 2 b_k.
double consensus_bound(long k, const TimeVaryingGraph& graph, const SipProblem& problem,
                       const SolverConfig& config, double initial_norm_sum);

/// b_1..b_K in one pass via the geometric-sum recurrence.
std::vector<double> consensus_bound_sequence(long k_max, const TimeVaryingGraph& graph,
                                             const SipProblem& problem, const SolverConfig& config,
                                             double initial_norm_sum);

/// Assembled constant C1 with F(xbar_K^i) - F* <= C1 / sqrt(K).
double suboptimality_constant(const SipProblem& problem, const TimeVaryingGraph& graph,
                              const SolverConfig& config, double initial_norm_sum);

struct BoundReport {
  double horizon_cap = 0.0;
  double round1_cap = 0.0;
  double feasibility = 0.0;
  double transition_gamma = 0.0;
  double transition_beta = 0.0;
  double final_consensus_bound = 0.0;  // b_K
  double c1 = 0.0;
  double c1_over_sqrt_k = 0.0;
  double l_f = 0.0;
  double l_g = 0.0;
  double l_combined = 0.0;
  double g0 = 0.0;
  double diameter = 0.0;
  long iterations = 0;

  std::string to_text() const;
};

BoundReport make_bound_report(const SipProblem& problem, const TimeVaryingGraph& graph,
                              const SolverConfig& config, double initial_norm_sum);

struct ReferenceResult {
  Vector x;
  double value = 0.0;
};

/// Exhaustive lattice search over X restricted to violation <= 0 (dim <= 4).
ReferenceResult centralized_reference_grid(const SipProblem& problem, int points_per_dim);

/// Single-node run of the distributed method for a large horizon.
ReferenceResult centralized_reference_algorithm(const SipProblem& problem, long iterations,
                                                std::uint64_t seed = 0);

struct CertificationSample {
  long index = 0;
  double w = 0.0;
  double terminal_norm_sq = 0.0;
  bool pass = false;
};

struct CertificationReport {
  std::vector<CertificationSample> samples;
  double max_terminal_norm_sq = 0.0;
  double threshold = 0.0;
  bool passed = true;

  void write_csv(std::ostream& out) const;
};

/// Monte-Carlo terminal-constraint certification: i.i.d. uniform parameter
/// draws, terminal norm checked against bound + tolerance.
CertificationReport metacontrol_certify(const MetaControlModel& model, const Vector& u,
                                        long samples, std::uint64_t seed, double tolerance);

struct G0Estimate {
  double min_grad_norm = 0.0;  // over sampled near-boundary points
  long points_used = 0;
};

/// Diagnostic only: samples X, keeps points with |max_u f| <= delta, reports
/// the smallest constraint-gradient norm seen. Never overrides configuration.
G0Estimate estimate_g0(const SipProblem& problem, long samples, double delta, std::uint64_t seed);

}  // namespace sip

#endif  // SIP_ANALYSIS_HPP
