#pragma once

#include <Eigen/Core>

namespace contraction_lab {

/// Numerical thresholds shared by all modules. Defaults are the documented
/// values; every field can be overridden from the command line.
struct Tolerances {
  /// An eigenvalue counts as exactly 1 iff it is >= 1 - eig.
  double eig = 1e-9;
  /// PSD slack per unit of dimension: eigenvalues >= -psd_per_dim * dim pass.
  double psd_per_dim = 1e-10;
  /// Relative residual threshold for the fixed-vector conditions.
  double fix = 1e-8;
  /// Slack for the a_n / b_n inequalities, per unit of dimension.
  double chain_per_dim = 1e-12;
  /// Absolute slack in the exponential rate bound.
  double rate = 1e-10;

  double psd(Eigen::Index dim) const { return psd_per_dim * static_cast<double>(dim); }
  double chain(Eigen::Index dim) const { return chain_per_dim * static_cast<double>(dim); }
};

}  // namespace contraction_lab
