#include "contraction_lab/nonexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "contraction_lab/errors.hpp"

namespace contraction_lab {

double row_angle(int n) { return std::numbers::pi / (2.0 * n); }

std::vector<Vector> NonexampleSequence::points() const {
  std::vector<Vector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(v.coords);
  return out;
}

NonexampleSequence build_nonexample(int n_max) {
  if (n_max < 2) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "build_nonexample: N_max must be >= 2, got " + std::to_string(n_max));
  }
  NonexampleSequence seq;
  seq.n_max = n_max;
  seq.ambient_dim = n_max + 1;
  seq.vectors.reserve(static_cast<std::size_t>(n_max * (n_max + 1) / 2));
  for (int n = 1; n <= n_max; ++n) {
    const double theta = row_angle(n);
    for (int j = 1; j <= n; ++j) {
      Vector coords = Vector::Zero(seq.ambient_dim);
      if (j == 1) {
        coords[n - 1] = 1.0;
      } else {
        const double angle = (j - 1) * theta;
        coords[n - 1] = std::cos(angle);
        coords[n] = std::sin(angle);
      }
      seq.vectors.push_back({sequence_index(n, j), n, j, std::move(coords)});
    }
  }
  return seq;
}

StepDistanceReport verify_step_distances(const NonexampleSequence& seq, double tolerance) {
  StepDistanceReport report;
  for (std::size_t i = 0; i + 1 < seq.vectors.size(); ++i) {
    const auto& a = seq.vectors[i];
    const auto& b = seq.vectors[i + 1];
    StepDistance step;
    step.m = a.m;
    step.n = a.n;
    step.j = a.j;
    step.kind = a.n == b.n ? StepKind::WithinRow : StepKind::CrossRow;
    step.measured = (b.coords - a.coords).norm();
    step.expected = 2.0 * std::sin(row_angle(a.n) / 2.0);
    step.matches = std::abs(step.measured - step.expected) <= tolerance;
    if (!step.matches) {
      (step.kind == StepKind::WithinRow ? report.within_row_ok : report.cross_row_ok) = false;
    }
    report.steps.push_back(step);
  }
  return report;
}

SequenceConditionReport verify_sequence_conditions(const NonexampleSequence& seq, int k_max, int c_max) {
  if (k_max < 1) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "k_max must be >= 1");
  }
  SequenceConditionReport report;
  if (c_max <= 0) c_max = seq.n_max - 1;
  c_max = std::min(c_max, seq.n_max - 1);

  // (i): coordinate c is never touched again once row c + 1 starts.
  for (int c = 1; c <= c_max; ++c) {
    WeakNullRow row;
    row.coordinate = c;
    row.from_index = sequence_index(c + 1, 1);
    for (int m = row.from_index; m <= static_cast<int>(seq.size()); ++m) {
      row.max_abs = std::max(row.max_abs, std::abs(seq.at(m).coords[c - 1]));
    }
    report.weak_null_ok = report.weak_null_ok && row.max_abs <= 1e-12;
    report.weak_null.push_back(row);
  }

  // (ii)
  report.min_norm = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& v : seq.vectors) {
    const double norm = v.coords.norm();
    report.min_norm = std::min(report.min_norm, norm);
    report.max_norm = std::max(report.max_norm, norm);
    if (norm > previous + 1e-12) report.norms_nonincreasing = false;
    previous = norm;
  }

  // (iii): per-row decay of single steps, then k-step tails inside the last row.
  for (int n = 2; n <= seq.n_max; ++n) {
    RowDecayRow row;
    row.n = n;
    row.bound = 2.0 * std::sin(std::numbers::pi / (4.0 * n));
    for (int j = 1; j < n; ++j) {
      const auto& a = seq.at(sequence_index(n, j)).coords;
      const auto& b = seq.at(sequence_index(n, j + 1)).coords;
      row.max_step = std::max(row.max_step, (b - a).norm());
    }
    report.tails_ok = report.tails_ok && row.max_step <= row.bound + 1e-10;
    report.row_decay.push_back(row);
  }

  const int last = seq.n_max;
  const double step_bound = 2.0 * std::sin(row_angle(last) / 2.0);
  for (int k = 1; k <= std::min(k_max, last - 1); ++k) {
    TailDifferenceRow row;
    row.k = k;
    row.bound = k * step_bound + 1e-10;
    for (int j = 1; j + k <= last; ++j) {
      const auto& a = seq.at(sequence_index(last, j)).coords;
      const auto& b = seq.at(sequence_index(last, j + k)).coords;
      row.tail_max = std::max(row.tail_max, (b - a).norm());
    }
    row.within_bound = row.tail_max <= row.bound;
    report.tails_ok = report.tails_ok && row.within_bound;
    report.tails.push_back(row);
  }
  return report;
}

NetGrowthReport verify_not_totally_bounded(const std::vector<int>& n_values, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "epsilon must be > 0");
  }
  NetGrowthReport report;
  report.lower_bound_asserted = epsilon < std::sqrt(2.0) / 2.0;
  std::size_t previous = 0;
  bool first = true;
  for (int n : n_values) {
    const auto seq = build_nonexample(n);
    const auto net = orbit_epsilon_net(seq.points(), epsilon);
    report.rows.push_back({n, epsilon, net.size()});
    if (report.lower_bound_asserted && net.size() < static_cast<std::size_t>(n)) {
      report.lower_bound_ok = false;
    }
    if (!first && net.size() <= previous) report.strictly_increasing = false;
    previous = net.size();
    first = false;
  }
  return report;
}

GivensStep plane_rotation(const Vector& from, const Vector& to, double tolerance) {
  if (from.size() != to.size()) throw DimensionMismatch("plane_rotation: vector sizes differ");
  const Eigen::Index dim = from.size();
  GivensStep step;
  step.plane_u = from;
  step.plane_v = Vector::Zero(dim);

  const Complex c = from.dot(to);  // coefficient of `to` along `from`
  const Vector w = to - c * from;
  const double s = w.norm();
  if (s <= tolerance) {
    if (std::abs(c - Complex(1.0, 0.0)) <= tolerance) {
      step.unitary = Matrix::Identity(dim, dim);
      step.identity = true;
      return step;
    }
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "plane_rotation: vectors are parallel but distinct; plane underdetermined");
  }
  step.plane_v = w / s;
  step.angle = std::atan2(s, c.real());

  Matrix basis(dim, 2);
  basis.col(0) = step.plane_u;
  basis.col(1) = step.plane_v;
  Eigen::Matrix2cd rotation;
  rotation << c, -s, s, std::conj(c);
  step.unitary = Matrix::Identity(dim, dim) +
                 basis * (rotation - Eigen::Matrix2cd::Identity()) * basis.adjoint();
  return step;
}

std::vector<GivensStep> givens_factorization(const NonexampleSequence& seq) {
  std::vector<GivensStep> steps;
  steps.reserve(seq.size());
  for (std::size_t i = 0; i + 1 < seq.vectors.size(); ++i) {
    auto step = plane_rotation(seq.vectors[i].coords, seq.vectors[i + 1].coords);
    step.m = seq.vectors[i].m;
    steps.push_back(std::move(step));
  }
  return steps;
}

int rank_of_difference_from_identity(const Matrix& u, double threshold) {
  Eigen::JacobiSVD<Matrix> svd(u - Matrix::Identity(u.rows(), u.cols()));
  return static_cast<int>((svd.singularValues().array() > threshold).count());
}

GivensVerification verify_givens(const NonexampleSequence& seq,
                                 const std::vector<GivensStep>& steps) {
  if (steps.size() + 1 != seq.size()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "verify_givens: need one step per consecutive pair");
  }
  GivensVerification out;
  const Eigen::Index dim = seq.ambient_dim;
  Vector running = Vector::Unit(dim, 0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    const Vector& from = seq.vectors[i].coords;
    const Vector& to = seq.vectors[i + 1].coords;
    out.max_unitarity_error =
        std::max(out.max_unitarity_error,
                 (step.unitary.adjoint() * step.unitary - Matrix::Identity(dim, dim)).norm());
    out.max_step_error = std::max(out.max_step_error, (step.unitary * from - to).norm());
    running = step.unitary * running;
    out.max_reconstruction_error = std::max(out.max_reconstruction_error, (running - to).norm());
    const int rank = rank_of_difference_from_identity(step.unitary);
    if (step.identity) {
      ++out.identity_steps;
      out.ranks_ok = out.ranks_ok && rank == 0;
    } else {
      out.ranks_ok = out.ranks_ok && rank == 2;
    }
  }
  return out;
}

}  // namespace contraction_lab
