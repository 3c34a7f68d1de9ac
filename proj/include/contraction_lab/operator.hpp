#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "contraction_lab/tolerances.hpp"

namespace contraction_lab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// A bounded self-adjoint operator on C^dim, stored as a dense Hermitian
/// matrix. The constructor hermitizes its input, so every Operator is exactly
/// Hermitian up to the rounding of (M + M*)/2.
class Operator {
 public:
  explicit Operator(const Matrix& entries);

  static Operator identity(Eigen::Index dim);
  static Operator zero(Eigen::Index dim);
  static Operator diagonal(const std::vector<double>& values);

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }

  Operator operator-(const Operator& other) const;
  Operator operator+(const Operator& other) const;

 private:
  Matrix entries_;
};

struct SpectralDecomposition {
  /// Ascending.
  RealVector eigenvalues;
  /// Orthonormal columns; column k belongs to eigenvalues[k].
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Orthogonal projection. `rank` is the number of eigenvectors selected to
/// build it, which equals its trace up to rounding.
struct Projection {
  Operator op;
  int rank = 0;

  Vector apply(const Vector& v) const { return op.matrix() * v; }
};

/// Real interval with open/closed endpoint flags.
struct Interval {
  double lo;
  double hi;
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval closed(double lo, double hi) { return {lo, hi, true, true}; }
  static Interval open(double lo, double hi) { return {lo, hi, false, false}; }

  /// Membership with every endpoint comparison relaxed (closed side) or
  /// tightened (open side) by `tol`.
  bool contains(double x, double tol) const;
};

SpectralDecomposition spectral_decompose(const Operator& a);

Projection spectral_projection(const Operator& a, const Interval& interval,
                               const Tolerances& tol = {});
Projection spectral_projection(const SpectralDecomposition& spec, const Interval& interval,
                               const Tolerances& tol = {});

/// P = 1_{1}(T). Throws PreconditionError unless T is a positive contraction.
Projection fixed_point_projection(const Operator& t, const Tolerances& tol = {});
Projection fixed_point_projection(const SpectralDecomposition& spec, const Tolerances& tol = {});

/// Outcome of an order test together with the eigenvalue that decided it.
struct OrderVerdict {
  bool holds = false;
  double witness = 0.0;

  explicit operator bool() const noexcept { return holds; }
};

/// All eigenvalues within [-tol_psd, 1 + tol_psd]. The witness is the
/// offending eigenvalue on failure and the eigenvalue nearest to violation
/// otherwise.
OrderVerdict is_positive_contraction(const Operator& t, const Tolerances& tol = {});

/// A <= B in the Loewner order. Witness is the smallest eigenvalue of B - A.
OrderVerdict loewner_leq(const Operator& a, const Operator& b, const Tolerances& tol = {});

struct FixedVectorReport {
  bool cond1 = true;  // T xi = xi
  bool cond2 = true;  // |T xi| = |xi|
  bool cond3 = true;  // <T xi, xi> = |xi|^2
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  /// Some residual falls inside [tol_fix / 10, tol_fix * 10].
  bool ambiguous = false;

  bool agree() const noexcept { return cond1 == cond2 && cond2 == cond3; }
};

FixedVectorReport check_fixed_vector_equivalence(const Operator& t, const Vector& xi,
                                                 const Tolerances& tol = {});

/// Checks 1_{1}(Tp) <= 1_{1}(T) given Tp <= T. Throws PreconditionError with
/// reason OrderingViolated when Tp <= T fails.
bool check_projection_monotone(const Operator& tp, const Operator& t, const Tolerances& tol = {});

/// Spectral square root with eigenvalues below zero clipped to zero.
Operator operator_sqrt(const Operator& a);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Inner product <x, y>, linear in the first argument.
inline Complex inner(const Vector& x, const Vector& y) { return y.dot(x); }

}  // namespace contraction_lab
