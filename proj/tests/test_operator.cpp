#include <doctest.h>

#include <cmath>

#include "contraction_lab/errors.hpp"
#include "contraction_lab/operator.hpp"
#include "contraction_lab/random.hpp"
#include "contraction_lab/verify.hpp"

using namespace contraction_lab;

namespace {

Matrix diag_matrix(const std::vector<double>& values) { return Operator::diagonal(values).matrix(); }

double dist(const Matrix& a, const Matrix& b) { return operator_norm(a - b); }

}  // namespace

TEST_CASE("operator construction rejects malformed input") {
  CHECK_THROWS_AS(Operator(Matrix(0, 0)), MalformedOperator);
  CHECK_THROWS_AS(Operator(Matrix::Zero(2, 3)), MalformedOperator);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(Operator{bad}, MalformedOperator);
}

TEST_CASE("construction hermitizes") {
  Matrix m(2, 2);
  m << 1.0, Complex(0.0, 1.0), Complex(0.0, 0.0), 0.5;
  const Operator op(m);
  CHECK(dist(op.matrix(), op.matrix().adjoint()) == 0.0);
  CHECK(op.matrix()(0, 1) == Complex(0.0, 0.5));
}

TEST_CASE("spectral_decompose on identity, diagonal and conjugated spectra") {
  const auto id = spectral_decompose(Operator::identity(3));
  for (int k = 0; k < 3; ++k) CHECK(id.eigenvalues[k] == doctest::Approx(1.0));

  const auto d = spectral_decompose(Operator::diagonal({0.2, 1.0, 0.5}));
  CHECK(d.eigenvalues[0] == doctest::Approx(0.2));
  CHECK(d.eigenvalues[1] == doctest::Approx(0.5));
  CHECK(d.eigenvalues[2] == doctest::Approx(1.0));

  auto rng = make_rng(42);
  const Matrix u = random_unitary(rng, 2);
  const Operator a(u * diag_matrix({0.3, 0.7}) * u.adjoint());
  const auto s = spectral_decompose(a);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(dist(s.reconstruct(), a.matrix()) < 1e-12);
  CHECK(dist(s.eigenvectors.adjoint() * s.eigenvectors, Matrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("random_unitary is unitary and seed-deterministic") {
  auto a = make_rng(5);
  auto b = make_rng(5);
  const Matrix u = random_unitary(a, 6);
  CHECK(dist(u.adjoint() * u, Matrix::Identity(6, 6)) < 1e-12);
  CHECK(dist(u, random_unitary(b, 6)) == 0.0);
}

TEST_CASE("spectral_projection on closed intervals") {
  const Operator t = Operator::diagonal({1.0, 0.5, 0.2});
  const auto top = spectral_projection(t, Interval::closed(1.0, 1.0));
  CHECK(top.rank == 1);
  CHECK(dist(top.op.matrix(), diag_matrix({1, 0, 0})) < 1e-12);

  const auto low = spectral_projection(t, Interval::closed(0.0, 0.6));
  CHECK(low.rank == 2);
  CHECK(dist(low.op.matrix(), diag_matrix({0, 1, 1})) < 1e-12);

  const auto p = low.op.matrix();
  CHECK(dist(p * p, p) < 1e-12);
  CHECK(p.trace().real() == doctest::Approx(2.0));
}

TEST_CASE("eigenvalues within tol_eig of 1 cluster into {1}") {
  const auto p = spectral_projection(Operator::diagonal({1.0 - 1e-12, 0.5}), Interval::closed(1.0, 1.0));
  CHECK(p.rank == 1);
  CHECK(fixed_point_projection(Operator::diagonal({1.0 - 1e-12, 0.5})).rank == 1);
  CHECK(fixed_point_projection(Operator::diagonal({1.0 - 1e-6, 0.5})).rank == 0);
}

TEST_CASE("fixed_point_projection") {
  const auto full = fixed_point_projection(Operator::identity(4));
  CHECK(full.rank == 4);
  CHECK(dist(full.op.matrix(), Matrix::Identity(4, 4)) < 1e-12);

  const auto two = fixed_point_projection(Operator::diagonal({1, 1, 0.3}));
  CHECK(two.rank == 2);
  CHECK(dist(two.op.matrix(), diag_matrix({1, 1, 0})) < 1e-12);

  const auto none = fixed_point_projection(Operator::diagonal({0.9, 0.5}));
  CHECK(none.rank == 0);
  CHECK(none.op.matrix().norm() == 0.0);

  try {
    fixed_point_projection(Operator::diagonal({1.5, 0.5}));
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(e.reason() == PreconditionError::Reason::NotPositiveContraction);
  }
}

TEST_CASE("is_positive_contraction with the psd slack") {
  CHECK(is_positive_contraction(Operator::diagonal({0.0, 0.5, 1.0})).holds);

  const auto neg = is_positive_contraction(Operator::diagonal({-0.01, 0.5}));
  CHECK_FALSE(neg.holds);
  CHECK(neg.witness == doctest::Approx(-0.01));

  CHECK(is_positive_contraction(Operator::diagonal({1.0 + 1e-12, 0.5})).holds);
  CHECK_FALSE(is_positive_contraction(Operator::diagonal({1.0 + 1e-6, 0.5})).holds);
}

TEST_CASE("loewner_leq") {
  CHECK(loewner_leq(Operator::diagonal({0.5, 0.5}), Operator::identity(2)).holds);

  const Operator a = Operator::diagonal({1, 0});
  const Operator b = Operator::diagonal({0, 1});
  CHECK_FALSE(loewner_leq(a, b).holds);
  CHECK_FALSE(loewner_leq(b, a).holds);
  CHECK(loewner_leq(a, b).witness == doctest::Approx(-1.0));

  auto rng = make_rng(3);
  const Operator r = random_positive_contraction(rng, 5);
  CHECK(loewner_leq(r, r).holds);

  CHECK_THROWS_AS(loewner_leq(Operator::identity(2), Operator::identity(3)), DimensionMismatch);
}

TEST_CASE("fixed vector equivalence on worked cases") {
  const auto id = check_fixed_vector_equivalence(Operator::identity(3), Vector::Ones(3));
  CHECK(id.cond1);
  CHECK(id.cond2);
  CHECK(id.cond3);
  CHECK(id.r1 < 1e-15);
  CHECK(id.r3 < 1e-15);

  const Operator t = Operator::diagonal({1.0, 0.5});
  const auto e1 = check_fixed_vector_equivalence(t, Vector::Unit(2, 0));
  CHECK((e1.cond1 && e1.cond2 && e1.cond3));

  const Vector mixed = Vector::Ones(2) / std::sqrt(2.0);
  const auto m = check_fixed_vector_equivalence(t, mixed);
  CHECK_FALSE(m.cond1);
  CHECK_FALSE(m.cond2);
  CHECK_FALSE(m.cond3);
  CHECK(m.r3 == doctest::Approx(0.25));
  CHECK(m.agree());
  CHECK_FALSE(m.ambiguous);

  const auto zero = check_fixed_vector_equivalence(t, Vector::Zero(2));
  CHECK((zero.cond1 && zero.cond2 && zero.cond3));
}

TEST_CASE("fixed vector equivalence holds on the seeded corpus") {
  int skipped = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(seed % 7);
    const auto c = sample_fixed_vector_case(seed, dim);
    const auto r = check_fixed_vector_equivalence(c.t, c.xi);
    if (r.ambiguous) {
      ++skipped;
      continue;
    }
    CAPTURE(seed);
    CHECK(r.agree());
  }
  CHECK(skipped < 10);
}

TEST_CASE("projection monotonicity") {
  CHECK(check_projection_monotone(Operator::diagonal({1, 0.2}), Operator::diagonal({1, 0.6})));
  CHECK(check_projection_monotone(Operator::diagonal({0.5, 0.2}), Operator::diagonal({1, 0.6})));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pair = sample_schur_pair(seed, 2 + static_cast<Eigen::Index>(seed % 5));
    CAPTURE(seed);
    CHECK(loewner_leq(pair.lower, pair.upper).holds);
    CHECK(check_projection_monotone(pair.lower, pair.upper));
  }
  try {
    check_projection_monotone(Operator::identity(2), Operator::diagonal({1, 0.5}));
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(e.reason() == PreconditionError::Reason::OrderingViolated);
  }
}

TEST_CASE("operator_sqrt squares back") {
  auto rng = make_rng(9);
  const Operator a = random_positive_contraction(rng, 4);
  const Matrix r = operator_sqrt(a).matrix();
  CHECK(dist(r * r, a.matrix()) < 1e-12);
  CHECK(operator_norm(diag_matrix({0.25, 0.0})) == doctest::Approx(0.25));
}

TEST_CASE("inner product is linear in the first argument") {
  Vector x = Vector::Unit(2, 0);
  Vector y = Vector::Unit(2, 0);
  const Complex i(0.0, 1.0);
  CHECK(inner(i * x, y) == i);
  CHECK(inner(x, i * y) == -i);
}
