#include "contraction_lab/chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "contraction_lab/errors.hpp"

namespace contraction_lab {

// ---------------------------------------------------------------------------
// EigenCurve

EigenCurve EigenCurve::constant(double c) {
  EigenCurve curve;
  curve.family_ = Family::Constant;
  curve.param_ = c;
  return curve;
}

EigenCurve EigenCurve::harmonic_to(double limit) {
  EigenCurve curve;
  curve.family_ = Family::HarmonicTo;
  curve.param_ = limit;
  return curve;
}

EigenCurve EigenCurve::geometric(double ratio) {
  EigenCurve curve;
  curve.family_ = Family::Geometric;
  curve.param_ = ratio;
  return curve;
}

EigenCurve EigenCurve::piecewise(std::vector<std::pair<int, double>> steps) {
  if (steps.empty() || steps.front().first != 1) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "piecewise curve must start at n = 1");
  }
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].first <= steps[i - 1].first) {
      throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                              "piecewise curve starts must be strictly increasing");
    }
  }
  EigenCurve curve;
  curve.family_ = Family::Piecewise;
  curve.steps_ = std::move(steps);
  return curve;
}

EigenCurve EigenCurve::dyadic_crowd(int k) {
  EigenCurve curve;
  curve.family_ = Family::DyadicCrowd;
  curve.param_ = k;
  return curve;
}

EigenCurve EigenCurve::reciprocal_gap(int k) {
  EigenCurve curve;
  curve.family_ = Family::ReciprocalGap;
  curve.param_ = k;
  return curve;
}

EigenCurve EigenCurve::custom(std::function<double(int)> fn, std::optional<double> limit) {
  EigenCurve curve;
  curve.family_ = Family::Custom;
  curve.fn_ = std::move(fn);
  curve.custom_limit_ = limit;
  return curve;
}

double EigenCurve::operator()(int n) const {
  const double dn = static_cast<double>(n);
  switch (family_) {
    case Family::Constant:
      return param_;
    case Family::HarmonicTo:
      return param_ * (1.0 + 1.0 / dn);
    case Family::Geometric:
      return std::pow(param_, dn);
    case Family::Piecewise: {
      double value = steps_.front().second;
      for (const auto& [start, v] : steps_) {
        if (start > n) break;
        value = v;
      }
      return value;
    }
    case Family::DyadicCrowd:
      return std::exp2(-(std::exp2(dn) - 1.0) / std::exp2(param_));
    case Family::ReciprocalGap:
      return std::clamp(1.0 - 1.0 / param_ - 1.0 / dn, 0.0, 1.0);
    case Family::Custom:
      return fn_(n);
  }
  return 0.0;
}

std::optional<double> EigenCurve::limit() const {
  switch (family_) {
    case Family::Constant:
    case Family::HarmonicTo:
      return param_;
    case Family::Geometric:
      return param_ < 1.0 ? 0.0 : param_;
    case Family::Piecewise:
      return steps_.back().second;
    case Family::DyadicCrowd:
      return 0.0;
    case Family::ReciprocalGap:
      return std::clamp(1.0 - 1.0 / param_, 0.0, 1.0);
    case Family::Custom:
      return custom_limit_;
  }
  return std::nullopt;
}

std::string_view family_name(EigenCurve::Family family) {
  switch (family) {
    case EigenCurve::Family::Constant: return "const";
    case EigenCurve::Family::HarmonicTo: return "harmonic_to";
    case EigenCurve::Family::Geometric: return "geometric";
    case EigenCurve::Family::Piecewise: return "piecewise";
    case EigenCurve::Family::DyadicCrowd: return "dyadic_crowd";
    case EigenCurve::Family::ReciprocalGap: return "reciprocal_gap";
    case EigenCurve::Family::Custom: return "custom";
  }
  return "custom";
}

// ---------------------------------------------------------------------------
// Chain kinds

namespace {

constexpr std::array<std::pair<ChainKind, std::string_view>, 6> kKindNames{{
    {ChainKind::Diagonal, "diagonal"},
    {ChainKind::SchurDecrement, "schur_decrement"},
    {ChainKind::ConjugatedDiagonal, "conjugated_diagonal"},
    {ChainKind::GapEngineered, "gap_engineered"},
    {ChainKind::NearOneAccumulating, "near_one_accumulating"},
    {ChainKind::Custom, "custom"},
}};

}  // namespace

std::string_view kind_name(ChainKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "custom";
}

std::optional<ChainKind> kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name && k != ChainKind::Custom) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ContractionChain

ContractionChain::ContractionChain(ChainKind kind, std::vector<Operator> operators,
                                   std::uint64_t seed, std::optional<Operator> analytic_limit,
                                   std::optional<CurveMetadata> curves)
    : kind_(kind),
      operators_(std::move(operators)),
      seed_(seed),
      analytic_limit_(std::move(analytic_limit)),
      curves_(std::move(curves)) {
  if (operators_.empty()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "chain needs at least one operator");
  }
  for (const auto& op : operators_) {
    if (op.dim() != operators_.front().dim()) throw DimensionMismatch("chain operators differ in dim");
  }
  if (analytic_limit_ && analytic_limit_->dim() != dim()) {
    throw DimensionMismatch("analytic limit dimension differs from chain");
  }
}

const Operator& ContractionChain::operator_at(int n) const {
  if (n < 1 || n > horizon()) {
    throw PreconditionError(PreconditionError::Reason::OutOfScope,
                            "operator_at(" + std::to_string(n) + ") outside [1, " +
                                std::to_string(horizon()) + "]");
  }
  return operators_[static_cast<std::size_t>(n - 1)];
}

ChainInvariantReport check_chain_invariants(const ContractionChain& chain, const Tolerances& tol) {
  for (int n = 1; n <= chain.horizon(); ++n) {
    const auto contraction = is_positive_contraction(chain.operator_at(n), tol);
    if (!contraction) {
      return {false, n,
              "T_" + std::to_string(n) + " is not a positive contraction (eigenvalue " +
                  std::to_string(contraction.witness) + ")"};
    }
    if (n == chain.horizon()) break;
    const auto order = loewner_leq(chain.operator_at(n + 1), chain.operator_at(n), tol);
    if (!order) {
      return {false, n,
              "T_" + std::to_string(n + 1) + " <= T_" + std::to_string(n) +
                  " fails (min eigenvalue " + std::to_string(order.witness) + ")"};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Generators

void validate_curves(const std::vector<EigenCurve>& curves, int horizon) {
  if (curves.empty()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "no eigencurves given");
  }
  if (horizon < 1) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "horizon must be >= 1");
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const int coord = static_cast<int>(k);
    double previous = curves[k](1);
    for (int n = 1; n <= horizon; ++n) {
      const double value = curves[k](n);
      if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw ChainError("curve " + std::to_string(k) + " leaves [0, 1] at n = " +
                             std::to_string(n) + " (value " + std::to_string(value) + ")",
                         n, coord);
      }
      if (value > previous) {
        throw ChainError("curve " + std::to_string(k) + " increases at n = " + std::to_string(n) +
                             " (" + std::to_string(previous) + " -> " + std::to_string(value) +
                             ")",
                         n, coord);
      }
      previous = value;
    }
  }
}

namespace {

std::vector<double> curve_values(const std::vector<EigenCurve>& curves, int n) {
  std::vector<double> values;
  values.reserve(curves.size());
  for (const auto& c : curves) values.push_back(c(n));
  return values;
}

/// Analytic limit when every curve knows its limit.
std::optional<RealVector> curve_limits(const std::vector<EigenCurve>& curves) {
  RealVector limits(static_cast<Eigen::Index>(curves.size()));
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto lim = curves[k].limit();
    if (!lim) return std::nullopt;
    limits[static_cast<Eigen::Index>(k)] = *lim;
  }
  return limits;
}

Operator conjugate(const Matrix& basis, const RealVector& values) {
  return Operator(basis * values.cast<Complex>().asDiagonal() * basis.adjoint());
}

ContractionChain curve_chain(ChainKind kind, const std::vector<EigenCurve>& curves, int horizon,
                             const Matrix& basis, std::uint64_t seed) {
  validate_curves(curves, horizon);
  std::vector<Operator> ops;
  ops.reserve(static_cast<std::size_t>(horizon));
  for (int n = 1; n <= horizon; ++n) {
    const auto values = curve_values(curves, n);
    ops.push_back(conjugate(basis, Eigen::Map<const RealVector>(
                                       values.data(), static_cast<Eigen::Index>(values.size()))));
  }
  std::optional<Operator> limit;
  if (const auto limits = curve_limits(curves)) limit = conjugate(basis, *limits);
  return ContractionChain(kind, std::move(ops), seed, std::move(limit),
                          CurveMetadata{basis, curves});
}

}  // namespace

ContractionChain diagonal_chain(const std::vector<EigenCurve>& curves, int horizon) {
  const auto dim = static_cast<Eigen::Index>(curves.size());
  return curve_chain(ChainKind::Diagonal, curves, horizon, Matrix::Identity(dim, dim), 0);
}

ContractionChain conjugated_diagonal_chain(const std::vector<EigenCurve>& curves, int horizon,
                                           std::uint64_t seed) {
  auto rng = make_rng(seed);
  const Matrix basis = random_unitary(rng, static_cast<Eigen::Index>(curves.size()));
  return curve_chain(ChainKind::ConjugatedDiagonal, curves, horizon, basis, seed);
}

ContractionChain schur_decrement_chain(const Operator& t1, const DecrementSampler& sampler,
                                       int horizon, std::uint64_t seed, const Tolerances& tol) {
  if (horizon < 1) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "horizon must be >= 1");
  }
  if (const auto v = is_positive_contraction(t1, tol); !v) {
    throw ChainError("T_1 is not a positive contraction (eigenvalue " + std::to_string(v.witness) +
                         ")",
                     1);
  }
  std::vector<Operator> ops;
  ops.reserve(static_cast<std::size_t>(horizon));
  ops.push_back(t1);
  const Matrix identity = Matrix::Identity(t1.dim(), t1.dim());
  for (int n = 1; n < horizon; ++n) {
    const Operator d = sampler(n);
    if (d.dim() != t1.dim()) throw DimensionMismatch("decrement dimension differs from T_1");
    if (const auto v = is_positive_contraction(d, tol); !v) {
      throw ChainError("decrement D_" + std::to_string(n) +
                           " is not a positive contraction (eigenvalue " +
                           std::to_string(v.witness) + ")",
                       n);
    }
    const Matrix root = operator_sqrt(ops.back()).matrix();
    ops.emplace_back(root * (identity - d.matrix()) * root);
  }
  return ContractionChain(ChainKind::SchurDecrement, std::move(ops), seed);
}

DecrementSampler random_decrement_sampler(std::uint64_t seed, Eigen::Index dim, double decay,
                                          const Matrix& fixed_projection) {
  const Matrix complement = Matrix::Identity(dim, dim) - fixed_projection;
  return [seed, dim, decay, complement](int n) {
    // Independent stream per step so D_n does not depend on call order.
    auto rng = make_rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n)));
    const Operator w = random_positive_contraction(rng, dim);
    return Operator(std::pow(decay, n) * complement * w.matrix() * complement);
  };
}

ContractionChain gap_engineered_chain(Eigen::Index dim, double delta, int fixed_rank,
                                      std::uint64_t seed, int horizon) {
  if (dim < 1) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "dim must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument, "delta out of (0,1)");
  }
  if (fixed_rank < 0 || fixed_rank > dim) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "fixed_rank out of [0, dim]");
  }
  auto rng = make_rng(seed);
  const Matrix basis = random_unitary(rng, dim);
  std::vector<EigenCurve> curves;
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (k < fixed_rank) {
      curves.push_back(EigenCurve::constant(1.0));
    } else if (k == fixed_rank) {
      // Pins the gap edge so the certificate delta is exactly `delta`.
      curves.push_back(EigenCurve::constant(1.0 - delta));
    } else {
      const double scale = uniform(rng, 0.2, 1.0);
      curves.push_back(EigenCurve::harmonic_to((1.0 - delta) * scale / 2.0));
    }
  }
  return curve_chain(ChainKind::GapEngineered, curves, horizon, basis, seed);
}

ContractionChain near_one_accumulating_chain(Eigen::Index dim, std::uint64_t seed, int horizon) {
  if (dim < 2) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "near_one_accumulating needs dim >= 2");
  }
  std::vector<EigenCurve> curves;
  for (Eigen::Index k = 1; k <= dim; ++k) curves.push_back(EigenCurve::dyadic_crowd(static_cast<int>(k)));
  return curve_chain(ChainKind::NearOneAccumulating, curves, horizon, Matrix::Identity(dim, dim),
                     seed);
}

}  // namespace contraction_lab
