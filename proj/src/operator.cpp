#include "contraction_lab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "contraction_lab/errors.hpp"

namespace contraction_lab {

Operator::Operator(const Matrix& entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw MalformedOperator("operator must be a non-empty square matrix, got " +
                            std::to_string(entries.rows()) + "x" +
                            std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) throw MalformedOperator("operator has non-finite entries");
  entries_ = (entries + entries.adjoint()) / 2.0;
}

Operator Operator::identity(Eigen::Index dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator Operator::zero(Eigen::Index dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator Operator::diagonal(const std::vector<double>& values) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()),
                          static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    m(k, k) = values[i];
  }
  return Operator(m);
}

Operator Operator::operator-(const Operator& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("operator dimensions differ");
  return Operator(entries_ - other.entries_);
}

Operator Operator::operator+(const Operator& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("operator dimensions differ");
  return Operator(entries_ + other.entries_);
}

Matrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

bool Interval::contains(double x, double tol) const {
  const bool above = lo_closed ? x >= lo - tol : x > lo + tol;
  const bool below = hi_closed ? x <= hi + tol : x < hi - tol;
  return above && below;
}

SpectralDecomposition spectral_decompose(const Operator& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw EigensolverFailure("self-adjoint eigensolver did not converge (dim " +
                             std::to_string(a.dim()) + ")");
  }
  // Eigen returns eigenvalues in increasing order.
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Projection spectral_projection(const SpectralDecomposition& spec, const Interval& interval,
                               const Tolerances& tol) {
  const Eigen::Index dim = spec.eigenvectors.rows();
  Matrix p = Matrix::Zero(dim, dim);
  int rank = 0;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (!interval.contains(spec.eigenvalues[k], tol.eig)) continue;
    const auto v = spec.eigenvectors.col(k);
    p.noalias() += v * v.adjoint();
    ++rank;
  }
  return {Operator(p), rank};
}

Projection spectral_projection(const Operator& a, const Interval& interval, const Tolerances& tol) {
  return spectral_projection(spectral_decompose(a), interval, tol);
}

namespace {

OrderVerdict contraction_verdict(const RealVector& eigenvalues, double slack) {
  const double lo = eigenvalues.minCoeff();
  const double hi = eigenvalues.maxCoeff();
  if (lo < -slack) return {false, lo};
  if (hi > 1.0 + slack) return {false, hi};
  // Report whichever end sits closer to its bound.
  return {true, lo < 1.0 - hi ? lo : hi};
}

}  // namespace

Projection fixed_point_projection(const SpectralDecomposition& spec, const Tolerances& tol) {
  const auto verdict = contraction_verdict(spec.eigenvalues, tol.psd(spec.eigenvectors.rows()));
  if (!verdict) {
    throw PreconditionError(PreconditionError::Reason::NotPositiveContraction,
                            "not a positive contraction: eigenvalue " +
                                std::to_string(verdict.witness));
  }
  return spectral_projection(spec, Interval::closed(1.0, 1.0), tol);
}

Projection fixed_point_projection(const Operator& t, const Tolerances& tol) {
  return fixed_point_projection(spectral_decompose(t), tol);
}

OrderVerdict is_positive_contraction(const Operator& t, const Tolerances& tol) {
  return contraction_verdict(spectral_decompose(t).eigenvalues, tol.psd(t.dim()));
}

OrderVerdict loewner_leq(const Operator& a, const Operator& b, const Tolerances& tol) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("loewner_leq: dimensions " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((b - a).matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw EigensolverFailure("loewner_leq: eigensolver failed");
  const double smallest = solver.eigenvalues()[0];
  return {smallest >= -tol.psd(a.dim()), smallest};
}

FixedVectorReport check_fixed_vector_equivalence(const Operator& t, const Vector& xi,
                                                 const Tolerances& tol) {
  if (xi.size() != t.dim()) throw DimensionMismatch("probe dimension differs from operator");
  const auto verdict = is_positive_contraction(t, tol);
  if (!verdict) {
    throw PreconditionError(PreconditionError::Reason::NotPositiveContraction,
                            "check_fixed_vector_equivalence: eigenvalue " +
                                std::to_string(verdict.witness));
  }
  FixedVectorReport report;
  const double norm = xi.norm();
  if (norm == 0.0) return report;

  const Vector txi = t.matrix() * xi;
  const double norm2 = norm * norm;
  report.r1 = (txi - xi).norm() / norm;
  report.r2 = std::abs(txi.norm() - norm) / norm;
  report.r3 = std::abs(inner(txi, xi) - Complex(norm2, 0.0)) / norm2;

  report.cond1 = report.r1 <= tol.fix;
  report.cond2 = report.r2 <= tol.fix;
  report.cond3 = report.r3 <= tol.fix;

  const auto in_band = [&](double r) { return r >= tol.fix / 10.0 && r <= tol.fix * 10.0; };
  report.ambiguous = in_band(report.r1) || in_band(report.r2) || in_band(report.r3);
  return report;
}

bool check_projection_monotone(const Operator& tp, const Operator& t, const Tolerances& tol) {
  const auto order = loewner_leq(tp, t, tol);
  if (!order) {
    throw PreconditionError(PreconditionError::Reason::OrderingViolated,
                            "check_projection_monotone: Tp <= T fails, min eigenvalue of T - Tp = " +
                                std::to_string(order.witness));
  }
  const auto p_prime = fixed_point_projection(tp, tol);
  const auto p = fixed_point_projection(t, tol);
  return loewner_leq(p_prime.op, p.op, tol).holds;
}

Operator operator_sqrt(const Operator& a) {
  const auto spec = spectral_decompose(a);
  const RealVector roots = spec.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return Operator(spec.eigenvectors * roots.cast<Complex>().asDiagonal() *
                  spec.eigenvectors.adjoint());
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

}  // namespace contraction_lab
