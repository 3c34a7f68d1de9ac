#include "contraction_lab/products.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contraction_lab/errors.hpp"
#include "contraction_lab/random.hpp"

namespace contraction_lab {

LimitEstimate limit_operator(const ContractionChain& chain) {
  if (chain.analytic_limit()) return {*chain.analytic_limit(), LimitProvenance::Analytic, 0.0};
  const int h = chain.horizon();
  const int half = std::max(1, h / 2);
  const double gap = operator_norm((chain.operator_at(h) - chain.operator_at(half)).matrix());
  return {chain.operator_at(h), LimitProvenance::Empirical, gap};
}

const TraceRow& ConvergenceTrace::row(int n, int probe_id) const {
  const auto count = static_cast<int>(probes.size());
  if (n < 1 || n > horizon || probe_id < 0 || probe_id >= count) {
    throw PreconditionError(PreconditionError::Reason::OutOfScope, "trace row out of range");
  }
  return rows[static_cast<std::size_t>((n - 1) * count + probe_id)];
}

ConvergenceTrace iterate_products(const ContractionChain& chain, const std::vector<Vector>& probes,
                                  int horizon, const Tolerances& tol) {
  if (horizon < 1 || horizon > chain.horizon()) {
    throw PreconditionError(PreconditionError::Reason::OutOfScope,
                            "horizon " + std::to_string(horizon) + " outside [1, " +
                                std::to_string(chain.horizon()) + "]");
  }
  if (probes.empty()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "at least one probe required");
  }
  const Eigen::Index dim = chain.dim();
  for (const auto& xi : probes) {
    if (xi.size() != dim) throw DimensionMismatch("probe dimension differs from chain");
    if (xi.norm() == 0.0) {
      throw PreconditionError(PreconditionError::Reason::InvalidArgument, "probes must be nonzero");
    }
  }

  ConvergenceTrace trace{dim, horizon, probes, Projection{Operator::zero(dim), 0},
                         limit_operator(chain), {}, {}};
  trace.limit_projection = fixed_point_projection(trace.limit.op, tol);
  const Matrix& p = trace.limit_projection.op.matrix();

  std::vector<Vector> fixed_parts;
  std::vector<Vector> unit_probes;
  for (const auto& xi : probes) {
    fixed_parts.push_back(p * xi);
    unit_probes.push_back(xi / xi.norm());
  }

  const bool has_lookahead = horizon < chain.horizon();
  const int last = has_lookahead ? horizon + 1 : horizon;

  // current[i] = S_{n-1} xi_i.
  Matrix s = Matrix::Identity(dim, dim);
  std::vector<Vector> current(probes.size());
  trace.rows.reserve(static_cast<std::size_t>(horizon) * probes.size());
  trace.product_norms.reserve(static_cast<std::size_t>(horizon));

  for (int n = 1; n <= last; ++n) {
    s = chain.operator_at(n).matrix() * s;
    std::vector<Vector> next(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) next[i] = s * probes[i];

    // Complete the lookahead fields of row n - 1.
    if (n >= 2) {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        auto& r = trace.rows[trace.rows.size() - probes.size() + i];
        r.consec_diff = (next[i] - current[i]).norm();
        r.a_n = inner(next[i], current[i]);
        r.b_next = next[i].squaredNorm();
      }
    }
    if (n > horizon) break;

    const Matrix deviation = s - p;
    const double opnorm = operator_norm(deviation);
    trace.product_norms.push_back(operator_norm(s));
    for (std::size_t i = 0; i < probes.size(); ++i) {
      TraceRow r;
      r.n = n;
      r.probe_id = static_cast<int>(i);
      r.sot_err = (next[i] - fixed_parts[i]).norm();
      r.adj_err = (s.adjoint() * probes[i] - fixed_parts[i]).norm();
      r.b_n = next[i].squaredNorm();
      const Vector dev = next[i] - fixed_parts[i];
      for (const auto& eta : unit_probes) r.wot_err = std::max(r.wot_err, std::abs(inner(dev, eta)));
      r.opnorm_err = opnorm;
      trace.rows.push_back(r);
    }
    current = std::move(next);
  }
  return trace;
}

std::vector<Vector> default_probes(const Projection& limit_projection, std::uint64_t seed) {
  const Eigen::Index dim = limit_projection.op.dim();
  std::vector<Vector> probes;
  for (Eigen::Index k = 0; k < dim; ++k) probes.push_back(Vector::Unit(dim, k));
  auto rng = make_rng(seed);
  for (int i = 0; i < 3; ++i) probes.push_back(random_unit_vector(rng, dim));

  const Matrix& p = limit_projection.op.matrix();
  const Matrix q = Matrix::Identity(dim, dim) - p;
  const Vector v = random_unit_vector(rng, dim);
  for (const Matrix* proj : {&p, &q}) {
    const Vector part = *proj * v;
    if (part.norm() > 1e-8) probes.push_back(part / part.norm());
  }
  return probes;
}

ProjectionConvergence check_projection_convergence(const ContractionChain& chain, int horizon,
                                                   const std::vector<Vector>& probes,
                                                   const Tolerances& tol) {
  if (horizon < 1 || horizon > chain.horizon()) {
    throw PreconditionError(PreconditionError::Reason::OutOfScope, "horizon exceeds chain");
  }
  const auto limit = limit_operator(chain);
  const Projection p = fixed_point_projection(limit.op, tol);

  ProjectionConvergence out;
  out.limit_rank = p.rank;
  for (int n = 1; n <= horizon; ++n) {
    const Projection pn = fixed_point_projection(chain.operator_at(n), tol);
    if (!out.ranks.empty() && pn.rank > out.ranks.back()) out.ranks_nonincreasing = false;
    out.ranks.push_back(pn.rank);
    std::vector<double> errs;
    const Matrix diff = pn.op.matrix() - p.op.matrix();
    for (const auto& xi : probes) errs.push_back((diff * xi).norm());
    out.errors.push_back(std::move(errs));
  }
  out.final_rank_dominates = out.ranks.back() >= out.limit_rank;
  return out;
}

bool ConsecutiveDifferenceReport::ok() const noexcept {
  if (!b_nonincreasing) return false;
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); });
}

ConsecutiveDifferenceReport consecutive_difference_report(const ConvergenceTrace& trace,
                                                          const Tolerances& tol,
                                                          double identity_tol) {
  const double slack = tol.chain(trace.dim);
  ConsecutiveDifferenceReport report;
  for (const auto& r : trace.rows) {
    if (!r.a_n || !r.b_next || !r.consec_diff) continue;
    ConsecutiveDifferenceRow out;
    out.n = r.n;
    out.probe_id = r.probe_id;
    out.a_n = r.a_n->real();
    out.b_n = r.b_n;
    out.b_next = *r.b_next;
    out.consec_diff = *r.consec_diff;
    out.a_nonnegative = out.a_n >= -slack;
    out.a_below_b = out.a_n <= out.b_n + slack;
    out.b_next_below_a = out.b_next <= out.a_n + slack;
    out.identity_residual =
        std::abs(out.consec_diff * out.consec_diff - (out.b_next + out.b_n - 2.0 * out.a_n));
    out.identity_holds = out.identity_residual <= identity_tol;

    report.worst_slack = std::max({report.worst_slack, -out.a_n, out.a_n - out.b_n,
                                   out.b_next - out.a_n});
    report.max_identity_residual = std::max(report.max_identity_residual, out.identity_residual);
    if (out.b_next > out.b_n + slack) report.b_nonincreasing = false;
    report.rows.push_back(out);
  }
  return report;
}

EpsilonNet orbit_epsilon_net(const std::vector<Vector>& points, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "epsilon must be > 0");
  }
  EpsilonNet net;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool far = std::all_of(net.members.begin(), net.members.end(), [&](std::size_t m) {
      return (points[i] - points[m]).norm() > epsilon;
    });
    if (far) net.members.push_back(i);
  }
  return net;
}

std::vector<Vector> orbit(const ContractionChain& chain, const Vector& xi, int horizon) {
  if (horizon < 1 || horizon > chain.horizon()) {
    throw PreconditionError(PreconditionError::Reason::OutOfScope, "horizon exceeds chain");
  }
  if (xi.size() != chain.dim()) throw DimensionMismatch("probe dimension differs from chain");
  std::vector<Vector> points;
  Vector v = xi;
  for (int n = 1; n <= horizon; ++n) {
    v = chain.operator_at(n).matrix() * v;
    points.push_back(v);
  }
  return points;
}

}  // namespace contraction_lab
