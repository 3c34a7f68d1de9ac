#include "contraction_lab/random.hpp"

#include <cmath>

namespace contraction_lab {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

namespace {

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

Matrix random_unitary(Rng& rng, Eigen::Index dim) {
  const Matrix g = gaussian_matrix(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(k) *= d / mag;
  }
  return q;
}

Vector random_unit_vector(Rng& rng, Eigen::Index dim) {
  Vector v = gaussian_matrix(rng, dim, 1).col(0);
  return v / v.norm();
}

Operator random_with_spectrum(Rng& rng, const std::vector<double>& values) {
  const auto dim = static_cast<Eigen::Index>(values.size());
  const Matrix u = random_unitary(rng, dim);
  RealVector d(dim);
  for (Eigen::Index k = 0; k < dim; ++k) d[k] = values[static_cast<std::size_t>(k)];
  return Operator(u * d.cast<Complex>().asDiagonal() * u.adjoint());
}

Operator random_positive_contraction(Rng& rng, Eigen::Index dim, double lo, double hi) {
  std::vector<double> values(static_cast<std::size_t>(dim));
  for (auto& v : values) v = uniform(rng, lo, hi);
  return random_with_spectrum(rng, values);
}

}  // namespace contraction_lab
