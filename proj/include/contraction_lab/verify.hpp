#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/tolerances.hpp"

namespace contraction_lab {

/// Outcome of one quantified property over the seeded corpus.
struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  /// Cases excluded from the verdict (e.g. residuals inside the ambiguity band).
  int skipped = 0;
  std::string first_failure;

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

struct VerifyConfig {
  int seeds = 10;
  std::vector<Eigen::Index> dims{2, 4, 8};
  /// Horizon for the chains exercised by the chain and product properties.
  int horizon = 60;
  /// Extra chains run through the chain-level properties, used to check that
  /// a broken fixture is actually caught.
  std::vector<ContractionChain> extra_chains;
  Tolerances tol;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool passed() const noexcept;
};

VerifyReport run_property_suite(const VerifyConfig& config);

/// (T, xi) pairs: xi in range(P), generic xi, and xi = fixed + c * generic
/// with c >= 1e-2.
struct FixedVectorCase {
  Operator t;
  Vector xi;
};
FixedVectorCase sample_fixed_vector_case(std::uint64_t seed, Eigen::Index dim);

/// (Tp, T) with Tp = T^{1/2} (I - D) T^{1/2}, where D sometimes vanishes on
/// part of range(1_{1}(T)) so that 1_{1}(Tp) is nontrivial.
struct OrderedPair {
  Operator lower;
  Operator upper;
};
OrderedPair sample_schur_pair(std::uint64_t seed, Eigen::Index dim);

/// (T, Tp, delta) meeting the preconditions of rank_strict_descent_check.
struct GapViolationCase {
  Operator t;
  Operator tp;
  double delta;
};
GapViolationCase sample_gap_violation(std::uint64_t seed, Eigen::Index dim);

/// Chain of the given kind with parameters drawn from `seed`; used by the
/// property suite and the acceptance corpus.
ContractionChain sample_chain(ChainKind kind, Eigen::Index dim, std::uint64_t seed, int horizon);

}  // namespace contraction_lab
