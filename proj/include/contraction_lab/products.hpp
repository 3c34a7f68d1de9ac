#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/operator.hpp"

namespace contraction_lab {

enum class LimitProvenance { Analytic, Empirical };

struct LimitEstimate {
  Operator op;
  LimitProvenance provenance = LimitProvenance::Analytic;
  /// |T_horizon - T_{horizon/2}|_op for empirical limits, 0 for analytic ones.
  double cauchy_gap = 0.0;
};

/// The SOT limit of the chain: the closed form when the generator knows it,
/// otherwise T_horizon.
LimitEstimate limit_operator(const ContractionChain& chain);

/// One (n, probe) row of a convergence trace. Fields that need S_{n+1}
/// are empty on the last row when the chain ends at the trace horizon.
struct TraceRow {
  int n = 0;
  int probe_id = 0;
  double sot_err = 0.0;                 // |S_n xi - P xi|
  double adj_err = 0.0;                 // |S_n^* xi - P xi|
  std::optional<double> consec_diff;    // |S_{n+1} xi - S_n xi|
  std::optional<Complex> a_n;           // <S_{n+1} xi, S_n xi>
  double b_n = 0.0;                     // <S_n xi, S_n xi>
  std::optional<double> b_next;         // b_{n+1}
  double wot_err = 0.0;                 // max over probes eta of |<(S_n - P) xi, eta>|
  double opnorm_err = 0.0;              // |S_n - P|_op
};

struct ConvergenceTrace {
  Eigen::Index dim = 0;
  int horizon = 0;
  std::vector<Vector> probes;
  Projection limit_projection;
  LimitEstimate limit;
  /// Row-major by n, then probe.
  std::vector<TraceRow> rows;
  /// |S_n|_op per n (index n - 1).
  std::vector<double> product_norms;

  const TraceRow& row(int n, int probe_id) const;
  const TraceRow& final_row(int probe_id) const { return row(horizon, probe_id); }
};

/// S_n = T_n S_{n-1}, S_0 = I, for n = 1..horizon, with per-probe diagnostics.
ConvergenceTrace iterate_products(const ContractionChain& chain, const std::vector<Vector>& probes,
                                  int horizon, const Tolerances& tol = {});

/// Standard basis, three seeded random unit vectors, and one unit vector each
/// in range(P) and range(P)^perp when those are nonzero.
std::vector<Vector> default_probes(const Projection& limit_projection, std::uint64_t seed);

struct ProjectionConvergence {
  /// rank(P_n), index n - 1.
  std::vector<int> ranks;
  /// |(P_n - P) xi| per n (outer) and probe (inner).
  std::vector<std::vector<double>> errors;
  int limit_rank = 0;
  bool ranks_nonincreasing = true;
  bool final_rank_dominates = true;

  bool ok() const noexcept { return ranks_nonincreasing && final_rank_dominates; }
};

ProjectionConvergence check_projection_convergence(const ContractionChain& chain, int horizon,
                                                   const std::vector<Vector>& probes,
                                                   const Tolerances& tol = {});

struct ConsecutiveDifferenceRow {
  int n = 0;
  int probe_id = 0;
  double a_n = 0.0;
  double b_n = 0.0;
  double b_next = 0.0;
  double consec_diff = 0.0;
  bool a_nonnegative = true;    // 0 <= a_n
  bool a_below_b = true;        // a_n <= b_n
  bool b_next_below_a = true;   // b_{n+1} <= a_n
  bool identity_holds = true;   // consec_diff^2 = b_{n+1} + b_n - 2 Re a_n
  double identity_residual = 0.0;

  bool ok() const noexcept { return a_nonnegative && a_below_b && b_next_below_a && identity_holds; }
};

struct ConsecutiveDifferenceReport {
  std::vector<ConsecutiveDifferenceRow> rows;
  bool b_nonincreasing = true;
  double max_identity_residual = 0.0;
  /// Largest violation of any of the three inequalities (<= 0 when all hold).
  double worst_slack = 0.0;

  bool ok() const noexcept;
};

/// `identity_tol` bounds |consec_diff^2 - (b_{n+1} + b_n - 2 Re a_n)|.
ConsecutiveDifferenceReport consecutive_difference_report(const ConvergenceTrace& trace,
                                                          const Tolerances& tol = {},
                                                          double identity_tol = 1e-10);

struct EpsilonNet {
  /// Indices into the input list, in the order they joined the net.
  std::vector<std::size_t> members;
  std::size_t size() const noexcept { return members.size(); }
};

/// Greedy net: scan in order, keep a point iff it is farther than epsilon
/// from every point kept so far.
EpsilonNet orbit_epsilon_net(const std::vector<Vector>& points, double epsilon);

/// The orbit S_1 xi, ..., S_horizon xi.
std::vector<Vector> orbit(const ContractionChain& chain, const Vector& xi, int horizon);

}  // namespace contraction_lab
