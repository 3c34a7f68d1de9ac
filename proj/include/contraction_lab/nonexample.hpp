#pragma once

#include <vector>

#include "contraction_lab/operator.hpp"
#include "contraction_lab/products.hpp"

namespace contraction_lab {

/// Position of eta_{n,j} in the flattened sequence: j + n(n-1)/2 (1-based).
constexpr int sequence_index(int n, int j) { return j + (n - 1) * n / 2; }

/// Rotation angle used in row n: pi / (2n).
double row_angle(int n);

struct NonexampleVector {
  int m = 0;  // sequence_index(n, j)
  int n = 0;
  int j = 0;
  Vector coords;  // in C^{ambient_dim}; coordinate c - 1 holds <xi, e_c>
};

/// Unit vectors eta_{n,j} = cos((j-1) theta_n) e_n + sin((j-1) theta_n) e_{n+1}
/// for n <= n_max, 1 <= j <= n, in lexicographic order.
struct NonexampleSequence {
  int n_max = 0;
  Eigen::Index ambient_dim = 0;
  std::vector<NonexampleVector> vectors;

  std::size_t size() const noexcept { return vectors.size(); }
  /// 1-based lookup by sequence index.
  const NonexampleVector& at(int m) const { return vectors.at(static_cast<std::size_t>(m - 1)); }
  std::vector<Vector> points() const;
};

NonexampleSequence build_nonexample(int n_max);

enum class StepKind { WithinRow, CrossRow };

struct StepDistance {
  int m = 0;  // distance between xi_m and xi_{m+1}
  int n = 0;  // row of xi_m
  int j = 0;
  StepKind kind = StepKind::WithinRow;
  double measured = 0.0;
  double expected = 0.0;  // 2 sin(theta_n / 2)
  bool matches = true;
};

struct StepDistanceReport {
  std::vector<StepDistance> steps;
  /// Within-row steps are asserted; cross-row ones are only reported.
  bool within_row_ok = true;
  bool cross_row_ok = true;
};

StepDistanceReport verify_step_distances(const NonexampleSequence& seq, double tolerance = 1e-10);

struct WeakNullRow {
  int coordinate = 0;
  int from_index = 0;  // first m checked: sequence_index(c + 1, 1)
  double max_abs = 0.0;
};

struct TailDifferenceRow {
  int k = 0;
  double tail_max = 0.0;  // max |xi_{m+k} - xi_m| with m, m + k in the last row
  double bound = 0.0;     // k * 2 sin(theta_last / 2) + slack
  bool within_bound = true;
};

struct RowDecayRow {
  int n = 0;
  double max_step = 0.0;  // max within-row |xi_{m+1} - xi_m|
  double bound = 0.0;     // 2 sin(pi / (4n))
};

struct SequenceConditionReport {
  std::vector<WeakNullRow> weak_null;    // condition (i), finite proxy
  bool weak_null_ok = true;
  double min_norm = 0.0;                 // condition (ii)
  double max_norm = 0.0;
  bool norms_nonincreasing = true;
  std::vector<TailDifferenceRow> tails;  // condition (iii)
  std::vector<RowDecayRow> row_decay;
  bool tails_ok = true;

  bool ok() const noexcept { return weak_null_ok && norms_nonincreasing && tails_ok; }
};

/// `c_max` defaults to n_max - 1, the last coordinate with a nonempty tail.
SequenceConditionReport verify_sequence_conditions(const NonexampleSequence& seq, int k_max, int c_max = 0);

struct NetGrowthRow {
  int n_max = 0;
  double epsilon = 0.0;
  std::size_t net_size = 0;
};

struct NetGrowthReport {
  std::vector<NetGrowthRow> rows;
  /// Only asserted for epsilon < sqrt(2)/2, where every basis vector e_n
  /// needs its own net member.
  bool lower_bound_asserted = false;
  bool lower_bound_ok = true;
  bool strictly_increasing = true;
};

/// Greedy epsilon-net size of each prefix sequence build_nonexample(N) for N
/// in `n_values` (ascending).
NetGrowthReport verify_not_totally_bounded(const std::vector<int>& n_values, double epsilon);

struct GivensStep {
  int m = 0;
  Matrix unitary;
  Vector plane_u;  // xi_m
  Vector plane_v;  // unit vector completing the rotation plane; zero for identity steps
  double angle = 0.0;
  bool identity = false;
};

/// Unitary rotating `from` onto `to` inside span{from, to} and fixing its
/// orthogonal complement. Both inputs must be unit vectors and not antipodal.
GivensStep plane_rotation(const Vector& from, const Vector& to, double tolerance = 1e-12);

/// One step per consecutive pair (xi_m, xi_{m+1}).
std::vector<GivensStep> givens_factorization(const NonexampleSequence& seq);

/// Numerical rank of U - I (singular values above `threshold`).
int rank_of_difference_from_identity(const Matrix& u, double threshold = 1e-9);

struct GivensVerification {
  double max_unitarity_error = 0.0;
  double max_step_error = 0.0;            // |U_m xi_m - xi_{m+1}|
  double max_reconstruction_error = 0.0;  // |U_m ... U_1 e_1 - xi_{m+1}|
  bool ranks_ok = true;                   // rank(U_m - I) == 2 on non-identity steps, 0 otherwise
  int identity_steps = 0;

  bool ok(double tolerance = 1e-9) const noexcept {
    return max_unitarity_error <= tolerance && max_step_error <= tolerance &&
           max_reconstruction_error <= tolerance && ranks_ok;
  }
};

GivensVerification verify_givens(const NonexampleSequence& seq, const std::vector<GivensStep>& steps);

}  // namespace contraction_lab
