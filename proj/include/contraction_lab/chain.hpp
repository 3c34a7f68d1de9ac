#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contraction_lab/operator.hpp"
#include "contraction_lab/random.hpp"

namespace contraction_lab {

/// Scalar eigencurve n -> lambda(n), n >= 1. Families with a closed form carry
/// their limit; `Custom` wraps an arbitrary function for programmatic use.
class EigenCurve {
 public:
  enum class Family {
    Constant,       // c
    HarmonicTo,     // L * (1 + 1/n), limit L
    Geometric,      // r^n, limit 0
    Piecewise,      // constant on [start_i, start_{i+1})
    DyadicCrowd,    // 2^{-(2^n - 1) / 2^k}: close to 1 for large k, limit 0
    ReciprocalGap,  // clip(1 - 1/k - 1/n, 0, 1); increasing in n, so never a valid chain
    Custom,
  };

  static EigenCurve constant(double c);
  static EigenCurve harmonic_to(double limit);
  static EigenCurve geometric(double ratio);
  /// `steps` are (start index, value) with the first start equal to 1.
  static EigenCurve piecewise(std::vector<std::pair<int, double>> steps);
  static EigenCurve dyadic_crowd(int k);
  static EigenCurve reciprocal_gap(int k);
  static EigenCurve custom(std::function<double(int)> fn, std::optional<double> limit = {});

  double operator()(int n) const;
  std::optional<double> limit() const;

  Family family() const noexcept { return family_; }
  double parameter() const noexcept { return param_; }
  const std::vector<std::pair<int, double>>& steps() const noexcept { return steps_; }

 private:
  Family family_ = Family::Constant;
  double param_ = 0.0;
  std::vector<std::pair<int, double>> steps_;
  std::function<double(int)> fn_;
  std::optional<double> custom_limit_;
};

std::string_view family_name(EigenCurve::Family family);

enum class ChainKind {
  Diagonal,
  SchurDecrement,
  ConjugatedDiagonal,
  GapEngineered,
  NearOneAccumulating,
  Custom,
};

std::string_view kind_name(ChainKind kind);
std::optional<ChainKind> kind_from_name(std::string_view name);

/// Present when every T_n = basis * diag(curve_k(n)) * basis^* with a fixed
/// unitary basis. Lets callers reason about all n, not just materialized ones.
struct CurveMetadata {
  Matrix basis;
  std::vector<EigenCurve> curves;
};

/// Decreasing sequence T_1 >= T_2 >= ... >= T_horizon of positive contractions.
/// Operators are materialized on construction, so the chain is an immutable
/// value and safe to share between threads.
class ContractionChain {
 public:
  ContractionChain(ChainKind kind, std::vector<Operator> operators, std::uint64_t seed,
                   std::optional<Operator> analytic_limit = {},
                   std::optional<CurveMetadata> curves = {});

  ChainKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return operators_.front().dim(); }
  int horizon() const noexcept { return static_cast<int>(operators_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }

  /// 1-based; throws PreconditionError outside [1, horizon].
  const Operator& operator_at(int n) const;

  const std::optional<Operator>& analytic_limit() const noexcept { return analytic_limit_; }
  const std::optional<CurveMetadata>& curve_metadata() const noexcept { return curves_; }

 private:
  ChainKind kind_;
  std::vector<Operator> operators_;
  std::uint64_t seed_;
  std::optional<Operator> analytic_limit_;
  std::optional<CurveMetadata> curves_;
};

struct ChainInvariantReport {
  bool ok = true;
  /// First offending step (1-based), 0 when ok.
  int first_bad_n = 0;
  std::string what;
};

/// Positivity/contraction of every T_n and T_{n+1} <= T_n for every n < horizon.
ChainInvariantReport check_chain_invariants(const ContractionChain& chain, const Tolerances& tol = {});

/// Throws ChainError naming the first curve and index at which a curve leaves
/// [0, 1] or increases.
void validate_curves(const std::vector<EigenCurve>& curves, int horizon);

ContractionChain diagonal_chain(const std::vector<EigenCurve>& curves, int horizon);

ContractionChain conjugated_diagonal_chain(const std::vector<EigenCurve>& curves, int horizon,
                                           std::uint64_t seed);

using DecrementSampler = std::function<Operator(int n)>;

/// T_{n+1} = T_n^{1/2} (I - D_n) T_n^{1/2}. Rejects D_n that is not a positive
/// contraction with a ChainError.
ContractionChain schur_decrement_chain(const Operator& t1, const DecrementSampler& sampler,
                                       int horizon, std::uint64_t seed = 0,
                                       const Tolerances& tol = {});

/// D_n = decay^n * Q W_n Q with W_n a random positive contraction and Q the
/// projection onto range(fixed)^perp, so the fixed space of T_1 is preserved.
DecrementSampler random_decrement_sampler(std::uint64_t seed, Eigen::Index dim, double decay,
                                          const Matrix& fixed_projection);

/// Random eigenbasis; `fixed_rank` eigenvalues equal to 1, one eigenvalue
/// pinned at 1 - delta, the rest decreasing in n below 1 - delta.
ContractionChain gap_engineered_chain(Eigen::Index dim, double delta, int fixed_rank,
                                      std::uint64_t seed, int horizon);

/// Diagonal chain with lambda_k(n) = 2^{-(2^n - 1) / 2^k}. For each n the
/// spectrum crowds toward 1 as k grows, while every curve decreases to 0.
ContractionChain near_one_accumulating_chain(Eigen::Index dim, std::uint64_t seed, int horizon);

/// Declarative chain description, as read from a spec document.
struct ChainSpec {
  ChainKind kind = ChainKind::Diagonal;
  Eigen::Index dim = 0;
  int horizon = 500;
  std::optional<std::uint64_t> seed;
  std::vector<EigenCurve> curves;
  double delta = 0.1;
  int fixed_rank = 0;
  double t_max = 0.9;
  double decay = 0.5;
};

inline constexpr int kDefaultHorizon = 500;

/// Parses and validates a chain spec document. Throws SpecError listing every
/// violation found.
ChainSpec parse_chain_spec(std::string_view document);

/// Materializes the chain described by `spec`.
ContractionChain build_chain(const ChainSpec& spec, const Tolerances& tol = {});

}  // namespace contraction_lab
