#pragma once

#include <cstdint>
#include <random>

#include "contraction_lab/operator.hpp"

namespace contraction_lab {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform in [lo, hi).
double uniform(Rng& rng, double lo, double hi);

/// Haar-distributed unitary, via QR of a complex Gaussian matrix with the
/// phases of R's diagonal absorbed into Q.
Matrix random_unitary(Rng& rng, Eigen::Index dim);

/// Unit vector drawn uniformly from the complex sphere.
Vector random_unit_vector(Rng& rng, Eigen::Index dim);

/// U diag(values) U* for a Haar-random U.
Operator random_with_spectrum(Rng& rng, const std::vector<double>& values);

/// Positive contraction with eigenvalues uniform in [lo, hi] and random eigenbasis.
Operator random_positive_contraction(Rng& rng, Eigen::Index dim, double lo = 0.0, double hi = 1.0);

}  // namespace contraction_lab
