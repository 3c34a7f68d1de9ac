#include "contraction_lab/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "contraction_lab/errors.hpp"
#include "contraction_lab/products.hpp"

namespace contraction_lab {

bool has_gap_at(const RealVector& eigenvalues, double delta, const Tolerances& tol) {
  const Interval excluded = Interval::open(1.0 - delta, 1.0);
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (excluded.contains(eigenvalues[k], tol.eig)) return false;
  }
  return true;
}

bool has_gap_at(const Operator& t, double delta, const Tolerances& tol) {
  return has_gap_at(spectral_decompose(t).eigenvalues, delta, tol);
}

bool rank_strict_descent_check(const Operator& t, const Operator& tp, double delta,
                               const Tolerances& tol) {
  using Reason = PreconditionError::Reason;
  if (const auto order = loewner_leq(tp, t, tol); !order) {
    throw PreconditionError(Reason::OrderingViolated,
                            "rank_strict_descent_check: Tp <= T fails (min eigenvalue " +
                                std::to_string(order.witness) + ")");
  }
  if (!has_gap_at(t, delta, tol)) {
    throw PreconditionError(Reason::GapMissing,
                            "rank_strict_descent_check: T has spectrum in (1 - delta, 1)");
  }
  if (has_gap_at(tp, delta, tol)) {
    throw PreconditionError(Reason::NoGapViolation,
                            "rank_strict_descent_check: Tp has no spectrum in (1 - delta, 1)");
  }
  return fixed_point_projection(tp, tol).rank < fixed_point_projection(t, tol).rank;
}

namespace {

int fixed_rank_of(const RealVector& eigenvalues, const Tolerances& tol) {
  return static_cast<int>((eigenvalues.array() >= 1.0 - tol.eig).count());
}

double top_below_one(const RealVector& eigenvalues, const Tolerances& tol) {
  double top = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (eigenvalues[k] < 1.0 - tol.eig) top = std::max(top, eigenvalues[k]);
  }
  return top;
}

/// Every curve either sits at or below 1 - delta from N on, or has a limit in
/// the cluster at 1; monotone curves then keep the gap for every n >= N.
bool gap_holds_for_all_n(const ContractionChain& chain, double delta, int n, const Tolerances& tol) {
  const auto& meta = chain.curve_metadata();
  if (!meta) return false;
  for (const auto& curve : meta->curves) {
    if (curve.family() == EigenCurve::Family::Custom) return false;
    if (curve(n) <= 1.0 - delta + tol.eig) continue;
    const auto lim = curve.limit();
    if (lim && *lim >= 1.0 - tol.eig) continue;
    return false;
  }
  return true;
}

}  // namespace

CertificateSearchResult certificate_search(const ContractionChain& chain, int horizon,
                                           const std::vector<double>& delta_grid,
                                           const Tolerances& tol) {
  using Reason = PreconditionError::Reason;
  if (horizon < 1 || horizon > chain.horizon()) {
    throw PreconditionError(Reason::OutOfScope, "certificate_search: horizon exceeds chain");
  }
  if (delta_grid.empty()) throw PreconditionError(Reason::InvalidArgument, "empty delta grid");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] > 0.0 && delta_grid[i] < 1.0)) {
      throw PreconditionError(Reason::InvalidArgument, "delta grid values must lie in (0,1)");
    }
    if (i > 0 && !(delta_grid[i] < delta_grid[i - 1])) {
      throw PreconditionError(Reason::InvalidArgument, "delta grid must be strictly descending");
    }
  }
  const double finest = delta_grid.back();

  std::vector<RealVector> spectra;
  std::vector<GapHit> hits;
  spectra.reserve(static_cast<std::size_t>(horizon));
  for (int n = 1; n <= horizon; ++n) {
    spectra.push_back(spectral_decompose(chain.operator_at(n)).eigenvalues);
    const double top = top_below_one(spectra.back(), tol);
    hits.push_back({n, top, Interval::open(1.0 - finest, 1.0).contains(top, tol.eig)});
  }
  const auto spectrum = [&](int n) -> const RealVector& {
    return spectra[static_cast<std::size_t>(n - 1)];
  };

  // Widest grid value strictly below `below` that gives T_n a gap.
  const auto widest_gap = [&](int n, double below) -> std::optional<double> {
    for (double d : delta_grid) {
      if (d < below && has_gap_at(spectrum(n), d, tol)) return d;
    }
    return std::nullopt;
  };

  std::vector<RankStep> trajectory;
  const auto fail = [&](int n, std::string message) {
    CertificateSearchResult result;
    result.failure = GapSearchFailure{n, top_below_one(spectrum(n), tol), trajectory, hits,
                                      std::move(message)};
    return result;
  };

  int current = 1;
  auto delta = widest_gap(current, std::numeric_limits<double>::infinity());
  if (!delta) return fail(current, "no grid delta gives T_1 a gap");
  trajectory.push_back({current, fixed_rank_of(spectrum(current), tol), *delta});

  while (true) {
    int violation = 0;
    for (int n = current + 1; n <= horizon; ++n) {
      if (!has_gap_at(spectrum(n), *delta, tol)) {
        violation = n;
        break;
      }
    }
    if (violation == 0) {
      GapCertificate cert;
      cert.delta = *delta;
      cert.N = current;
      cert.rank_trajectory = trajectory;
      cert.verified_horizon = horizon;
      cert.scope = gap_holds_for_all_n(chain, *delta, current, tol) ? CertificateScope::Analytic
                                                                    : CertificateScope::Empirical;
      CertificateSearchResult result;
      result.certificate = std::move(cert);
      return result;
    }
    if (!rank_strict_descent_check(chain.operator_at(current), chain.operator_at(violation),
                                   *delta, tol)) {
      throw RankDescentFailure("rank(P_n) did not drop at gap violation n = " +
                                   std::to_string(violation),
                               violation);
    }
    const auto next = widest_gap(violation, *delta);
    if (!next) {
      return fail(violation, "grid exhausted at n = " + std::to_string(violation) +
                                 ": spectrum meets (1 - " + std::to_string(finest) + ", 1)");
    }
    current = violation;
    delta = next;
    trajectory.push_back({current, fixed_rank_of(spectrum(current), tol), *delta});
  }
}

RateTable rate_bound_check(const ContractionChain& chain, const GapCertificate& certificate,
                           const Vector& xi, double epsilon, std::optional<int> n0,
                           std::optional<int> max_j, const Tolerances& tol) {
  using Reason = PreconditionError::Reason;
  if (xi.size() != chain.dim()) throw DimensionMismatch("probe dimension differs from chain");
  if (epsilon < 0.0) throw PreconditionError(Reason::InvalidArgument, "epsilon must be >= 0");

  const int reach = certificate.scope == CertificateScope::Empirical
                        ? std::min(certificate.verified_horizon, chain.horizon())
                        : chain.horizon();

  const Eigen::Index dim = chain.dim();
  const Matrix identity = Matrix::Identity(dim, dim);
  const Projection p = fixed_point_projection(limit_operator(chain).op, tol);
  const Vector x = (identity - p.op.matrix()) * xi;

  const auto complement_of = [&](int n) {
    return Matrix(identity - fixed_point_projection(chain.operator_at(n), tol).op.matrix());
  };

  int start = 0;
  double split_error = 0.0;
  if (n0) {
    start = *n0;
    if (start < 1 || start > reach) {
      throw PreconditionError(Reason::OutOfScope, "rate_bound_check: n0 outside verified range");
    }
    split_error = (x - complement_of(start) * x).norm();
  } else {
    for (int n = std::max(1, certificate.N); n <= reach; ++n) {
      split_error = (x - complement_of(n) * x).norm();
      if (split_error <= epsilon) {
        start = n;
        break;
      }
    }
    if (start == 0) {
      throw PreconditionError(Reason::OutOfScope,
                              "rate_bound_check: no n0 with |xi - P_n0^perp xi| <= epsilon");
    }
  }
  if (start < certificate.N) {
    throw PreconditionError(Reason::OutOfScope, "rate_bound_check: n0 below certificate N");
  }
  const int span = max_j.value_or(reach - start);
  if (span < 0 || start + span > reach) {
    throw PreconditionError(Reason::OutOfScope,
                            "rate_bound_check: j range exceeds the certificate's verified horizon");
  }

  RateTable table;
  table.n0 = start;
  table.epsilon = epsilon;
  table.delta = certificate.delta;
  table.split_error = split_error;

  // S_{n0} x and S_{n0} P_{n0}^perp x.
  Vector image = x;
  Vector eta_prime = complement_of(start) * x;
  for (int n = 1; n <= start; ++n) {
    image = chain.operator_at(n).matrix() * image;
    eta_prime = chain.operator_at(n).matrix() * eta_prime;
  }
  table.eta_prime_norm = eta_prime.norm();

  std::vector<double> js;
  std::vector<double> logs;
  for (int j = 0; j <= span; ++j) {
    if (j > 0) image = chain.operator_at(start + j).matrix() * image;
    RateRow row;
    row.j = j;
    row.lhs = image.norm();
    row.rhs = epsilon + std::pow(1.0 - certificate.delta, j) * table.eta_prime_norm;
    row.slack = row.rhs - row.lhs;
    row.holds = row.lhs <= row.rhs + tol.rate;
    table.all_hold = table.all_hold && row.holds;
    if (row.lhs > tol.rate) {
      js.push_back(j);
      logs.push_back(std::log(row.lhs));
    }
    table.rows.push_back(row);
  }

  table.fitted_points = static_cast<int>(js.size());
  if (js.size() < 2) {
    table.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto count = static_cast<double>(js.size());
    double mean_j = 0.0;
    double mean_log = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
      mean_j += js[i];
      mean_log += logs[i];
    }
    mean_j /= count;
    mean_log /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) {
      sxy += (js[i] - mean_j) * (logs[i] - mean_log);
      sxx += (js[i] - mean_j) * (js[i] - mean_j);
    }
    table.fitted_slope = sxy / sxx;
  }
  return table;
}

}  // namespace contraction_lab
