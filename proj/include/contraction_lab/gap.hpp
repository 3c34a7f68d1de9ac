#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/operator.hpp"

namespace contraction_lab {

/// True iff no eigenvalue lies in (1 - delta, 1). Eigenvalues within tol.eig
/// of an endpoint count as sitting on it, so the cluster at 1 never breaks a gap.
bool has_gap_at(const Operator& t, double delta, const Tolerances& tol = {});
bool has_gap_at(const RealVector& eigenvalues, double delta, const Tolerances& tol = {});

enum class CertificateScope { Analytic, Empirical };

struct RankStep {
  int n = 0;
  int rank = 0;
  double delta = 0.0;
};

/// Witness (delta, N) that sigma(T_n) misses (1 - delta, 1) for all n >= N.
/// Empirical certificates are only checked for N <= n <= verified_horizon.
struct GapCertificate {
  double delta = 0.0;
  int N = 1;
  std::vector<RankStep> rank_trajectory;
  CertificateScope scope = CertificateScope::Empirical;
  int verified_horizon = 0;
};

/// Per-n record of the largest eigenvalue outside the cluster at 1.
struct GapHit {
  int n = 0;
  double top_below_one = 0.0;
  /// top_below_one falls inside (1 - finest grid delta, 1).
  bool hits_finest = false;
};

struct GapSearchFailure {
  /// Step at which no grid value below the current delta gave a gap.
  int failed_at = 0;
  /// Eigenvalue of T_failed_at that defeated the finest grid value.
  double offending_eigenvalue = 0.0;
  std::vector<RankStep> rank_trajectory;
  std::vector<GapHit> hits;
  std::string message;
};

struct CertificateSearchResult {
  std::optional<GapCertificate> certificate;
  std::optional<GapSearchFailure> failure;

  bool found() const noexcept { return certificate.has_value(); }
};

inline const std::vector<double> kDefaultDeltaGrid{0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001};

/// Rank-descent search for a uniform gap certificate over T_1..T_horizon.
/// Throws RankDescentFailure if a violation is not accompanied by a strict
/// drop of rank(P_n).
CertificateSearchResult certificate_search(const ContractionChain& chain, int horizon,
                                           const std::vector<double>& delta_grid = kDefaultDeltaGrid,
                                           const Tolerances& tol = {});

/// Given T >= Tp, a gap of width delta for T and none for Tp, reports whether
/// rank 1_{1}(Tp) < rank 1_{1}(T). Precondition failures throw
/// PreconditionError with a distinct reason each.
bool rank_strict_descent_check(const Operator& t, const Operator& tp, double delta,
                               const Tolerances& tol = {});

struct RateRow {
  int j = 0;
  double lhs = 0.0;    // |S_{n0+j} xi|
  double rhs = 0.0;    // epsilon + (1 - delta)^j |eta'|
  double slack = 0.0;  // rhs - lhs
  bool holds = true;
};

struct RateTable {
  int n0 = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double eta_prime_norm = 0.0;
  /// |xi - P_{n0}^perp xi| for the component of xi in range(P)^perp.
  double split_error = 0.0;
  std::vector<RateRow> rows;
  /// Least-squares slope of log |S_{n0+j} xi| against j over rows with
  /// lhs > tol.rate (below that, rounding dominates); NaN with fewer than two.
  double fitted_slope = 0.0;
  int fitted_points = 0;
  bool all_hold = true;
};

/// Compares |S_{n0+j} xi| with epsilon + (1 - delta)^j |eta'|, eta' =
/// S_{n0} P_{n0}^perp xi, for j = 0..max_j. xi is replaced by P^perp xi.
/// n0 defaults to the smallest n >= N with |xi - P_n^perp xi| <= epsilon.
RateTable rate_bound_check(const ContractionChain& chain, const GapCertificate& certificate,
                           const Vector& xi, double epsilon, std::optional<int> n0 = {},
                           std::optional<int> max_j = {}, const Tolerances& tol = {});

}  // namespace contraction_lab
