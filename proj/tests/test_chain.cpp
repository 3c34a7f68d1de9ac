#include <doctest.h>

#include <cmath>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/errors.hpp"
#include "contraction_lab/io.hpp"
#include "contraction_lab/verify.hpp"

using namespace contraction_lab;

namespace {

double dist(const Matrix& a, const Matrix& b) { return operator_norm(a - b); }

std::vector<double> spectrum(const Operator& t) {
  const auto s = spectral_decompose(t);
  return {s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size()};
}

}  // namespace

TEST_CASE("eigencurve families evaluate their closed forms") {
  CHECK(EigenCurve::constant(0.3)(17) == 0.3);
  CHECK(EigenCurve::harmonic_to(0.5)(1) == doctest::Approx(1.0));
  CHECK(EigenCurve::harmonic_to(0.5)(4) == doctest::Approx(0.625));
  CHECK(*EigenCurve::harmonic_to(0.5).limit() == 0.5);
  CHECK(EigenCurve::geometric(0.9)(3) == doctest::Approx(0.729));
  CHECK(*EigenCurve::geometric(0.9).limit() == 0.0);

  const auto step = EigenCurve::piecewise({{1, 1.0}, {11, 0.9}});
  CHECK(step(10) == 1.0);
  CHECK(step(11) == 0.9);
  CHECK(*step.limit() == 0.9);
  CHECK_THROWS(EigenCurve::piecewise({{2, 1.0}}));
  CHECK_THROWS(EigenCurve::piecewise({{1, 1.0}, {1, 0.5}}));

  CHECK(EigenCurve::dyadic_crowd(1)(1) == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(EigenCurve::dyadic_crowd(3)(2) == doctest::Approx(std::pow(2.0, -3.0 / 8.0)));
}

TEST_CASE("diagonal chain: telescoping example") {
  const auto chain = diagonal_chain({EigenCurve::constant(1.0), EigenCurve::harmonic_to(0.5)}, 20);
  CHECK(chain.horizon() == 20);
  CHECK(dist(chain.operator_at(3).matrix(), Operator::diagonal({1.0, (1.0 + 1.0 / 3) / 2}).matrix()) < 1e-15);
  REQUIRE(chain.analytic_limit());
  CHECK(dist(chain.analytic_limit()->matrix(), Operator::diagonal({1.0, 0.5}).matrix()) < 1e-15);
  CHECK(check_chain_invariants(chain).ok);
  CHECK_THROWS_AS(chain.operator_at(0), PreconditionError);
  CHECK_THROWS_AS(chain.operator_at(21), PreconditionError);
}

TEST_CASE("constant and geometric diagonal chains") {
  const auto flat = diagonal_chain({EigenCurve::constant(0.4), EigenCurve::constant(1.0)}, 5);
  for (int n = 2; n <= 5; ++n) CHECK(dist(flat.operator_at(n).matrix(), flat.operator_at(1).matrix()) == 0.0);
  CHECK(dist(flat.analytic_limit()->matrix(), flat.operator_at(1).matrix()) == 0.0);

  const auto geo = diagonal_chain({EigenCurve::geometric(0.9)}, 10);
  CHECK(geo.operator_at(10).matrix()(0, 0).real() == doctest::Approx(std::pow(0.9, 10)));
  CHECK(geo.analytic_limit()->matrix().norm() == 0.0);
}

TEST_CASE("validate_curves rejects increasing and out-of-range curves") {
  // lambda(n) = 1 - 1/(n+1) rises with n.
  const auto rising = EigenCurve::custom([](int n) { return 1.0 - 1.0 / (n + 1.0); });
  try {
    validate_curves({EigenCurve::constant(1.0), rising}, 10);
    FAIL("expected ChainError");
  } catch (const ChainError& e) {
    CHECK(e.index() == 2);
    CHECK(e.coordinate() == 1);
  }
  CHECK_THROWS_AS(diagonal_chain({EigenCurve::reciprocal_gap(2)}, 10), ChainError);
  CHECK_THROWS_AS(diagonal_chain({EigenCurve::custom([](int) { return 1.2; })}, 3), ChainError);
  CHECK_THROWS_AS(diagonal_chain({EigenCurve::custom([](int) { return -0.1; })}, 3), ChainError);
}

TEST_CASE("reciprocal gap curve is increasing, so unusable for a chain") {
  const auto c = EigenCurve::reciprocal_gap(2);
  CHECK(c(1) == 0.0);
  CHECK(c(4) == doctest::Approx(0.25));
  CHECK(c(5) > c(4));
  CHECK(EigenCurve::reciprocal_gap(1)(9) == 0.0);
}

TEST_CASE("conjugated chain keeps its spectrum and is deterministic") {
  const std::vector<EigenCurve> curves{EigenCurve::constant(1.0), EigenCurve::geometric(0.7),
                                       EigenCurve::harmonic_to(0.2)};
  const auto a = conjugated_diagonal_chain(curves, 15, 4);
  const auto b = conjugated_diagonal_chain(curves, 15, 4);
  const auto c = conjugated_diagonal_chain(curves, 15, 5);
  CHECK(dist(a.operator_at(7).matrix(), b.operator_at(7).matrix()) == 0.0);
  CHECK(dist(a.operator_at(7).matrix(), c.operator_at(7).matrix()) > 1e-3);
  const auto s = spectrum(a.operator_at(2));
  CHECK(s[0] == doctest::Approx(0.2 * 1.5).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_chain_invariants(a).ok);
}

TEST_CASE("schur decrement chain") {
  auto rng = make_rng(1);
  const Operator t1 = random_positive_contraction(rng, 3);

  const auto frozen = schur_decrement_chain(t1, [](int) { return Operator::zero(3); }, 6);
  for (int n = 1; n <= 6; ++n) CHECK(dist(frozen.operator_at(n).matrix(), t1.matrix()) < 1e-12);

  const auto collapse = schur_decrement_chain(t1, [](int) { return Operator::identity(3); }, 4);
  for (int n = 2; n <= 4; ++n) CHECK(collapse.operator_at(n).matrix().norm() < 1e-12);

  const auto random = schur_decrement_chain(
      t1, random_decrement_sampler(2, 3, 0.5, Matrix::Zero(3, 3)), 30, 2);
  for (int n = 1; n < 30; ++n) {
    CHECK(loewner_leq(random.operator_at(n + 1), random.operator_at(n)).holds);
    CHECK(is_positive_contraction(random.operator_at(n)).holds);
  }

  CHECK_THROWS_AS(schur_decrement_chain(t1, [](int) { return Operator::diagonal({1.5, 0, 0}); }, 3),
                  ChainError);
  CHECK_THROWS_AS(schur_decrement_chain(Operator::diagonal({2.0}), [](int) { return Operator::zero(1); }, 3),
                  ChainError);
}

TEST_CASE("schur decrement sampler preserves the fixed space of T_1") {
  ChainSpec spec;
  spec.kind = ChainKind::SchurDecrement;
  spec.dim = 4;
  spec.horizon = 40;
  spec.seed = 8;
  spec.fixed_rank = 2;
  const auto chain = build_chain(spec);
  for (int n = 1; n <= 40; ++n) CHECK(fixed_point_projection(chain.operator_at(n)).rank == 2);
}

TEST_CASE("gap engineered chain") {
  const auto chain = gap_engineered_chain(3, 0.1, 1, 5, 50);
  for (int n = 1; n <= 50; ++n) {
    const auto s = spectrum(chain.operator_at(n));
    CHECK(s[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s[1] <= 0.9 + 1e-12);
    CHECK(s[0] <= 0.9 + 1e-12);
  }
  CHECK(check_chain_invariants(chain).ok);

  const auto none = gap_engineered_chain(3, 0.1, 0, 5, 20);
  CHECK(fixed_point_projection(none.operator_at(20)).rank == 0);
  CHECK(fixed_point_projection(*none.analytic_limit()).rank == 0);

  const auto all = gap_engineered_chain(3, 0.1, 3, 5, 20);
  for (int n = 1; n <= 20; ++n) CHECK(dist(all.operator_at(n).matrix(), Matrix::Identity(3, 3)) < 1e-12);
}

TEST_CASE("near one accumulating chain") {
  const auto chain = near_one_accumulating_chain(4, 0, 10);
  CHECK(check_chain_invariants(chain).ok);
  const auto s = spectrum(chain.operator_at(1));
  for (int k = 1; k <= 4; ++k) CHECK(s[static_cast<std::size_t>(k - 1)] == doctest::Approx(std::pow(2.0, -1.0 / std::pow(2.0, k))));
  // Top eigenvalue at n = 1 approaches 1 as the dimension grows.
  const auto wide = near_one_accumulating_chain(16, 0, 2);
  CHECK(spectrum(wide.operator_at(1)).back() > 1.0 - 2e-5);
  CHECK(spectrum(wide.operator_at(1)).back() < 1.0 - 1e-9);
  CHECK_THROWS(near_one_accumulating_chain(1, 0, 5));
}

TEST_CASE("chain invariants catch a broken chain") {
  ContractionChain bad(ChainKind::Custom,
                       {Operator::diagonal({0.5, 0.5}), Operator::diagonal({0.8, 0.8})}, 0);
  const auto r = check_chain_invariants(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.first_bad_n == 1);

  ContractionChain expanding(ChainKind::Custom, {Operator::diagonal({1.2})}, 0);
  CHECK_FALSE(check_chain_invariants(expanding).ok);
}

TEST_CASE("sampled chains satisfy the invariants for every kind") {
  for (auto kind : {ChainKind::Diagonal, ChainKind::SchurDecrement, ChainKind::ConjugatedDiagonal,
                    ChainKind::GapEngineered, ChainKind::NearOneAccumulating}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto chain = sample_chain(kind, 5, seed, 40);
      CAPTURE(kind_name(kind));
      CAPTURE(seed);
      CHECK(check_chain_invariants(chain).ok);
      const auto again = sample_chain(kind, 5, seed, 40);
      CHECK(dist(chain.operator_at(40).matrix(), again.operator_at(40).matrix()) == 0.0);
    }
  }
}

TEST_CASE("chain spec parsing") {
  const auto spec = parse_chain_spec(
      R"({"kind":"diagonal","dim":2,"curves":[["const",1],["harmonic_to",0.5]],"horizon":200})");
  CHECK(spec.kind == ChainKind::Diagonal);
  CHECK(spec.dim == 2);
  CHECK(spec.horizon == 200);
  REQUIRE(spec.curves.size() == 2);
  CHECK(spec.curves[1].family() == EigenCurve::Family::HarmonicTo);

  CHECK(parse_chain_spec(R"({"kind":"near_one_accumulating","dim":3})").horizon == kDefaultHorizon);

  try {
    parse_chain_spec(R"({"kind":"schur_decrement","dim":3})");
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("seed required") != std::string::npos);
  }

  try {
    parse_chain_spec(R"({"kind":"gap_engineered","dim":3,"delta":1.5,"seed":1})");
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(std::string(e.what()).find("delta out of (0,1)") != std::string::npos);
  }

  try {
    parse_chain_spec(R"({"kind":"diagonal","dim":0,"bogus":1})");
    FAIL("expected SpecError");
  } catch (const SpecError& e) {
    CHECK(e.violations().size() >= 2);
  }

  CHECK_THROWS_AS(parse_chain_spec("{"), SpecError);
  CHECK_THROWS_AS(parse_chain_spec(R"({"kind":"spiral","dim":2})"), SpecError);
  CHECK_THROWS_AS(parse_chain_spec(R"({"kind":"diagonal","dim":2,"curves":[["const",1]]})"), SpecError);
}

TEST_CASE("chain spec builds the same chain twice") {
  const auto spec = parse_chain_spec(R"({"kind":"schur_decrement","dim":3,"seed":4,"horizon":25})");
  const auto a = build_chain(spec);
  const auto b = build_chain(spec);
  for (int n = 1; n <= 25; ++n) CHECK(dist(a.operator_at(n).matrix(), b.operator_at(n).matrix()) == 0.0);
  CHECK(check_chain_invariants(a).ok);
}

TEST_CASE("curve and spec JSON round trip") {
  const auto spec = parse_chain_spec(
      R"({"kind":"diagonal","dim":3,"horizon":9,"curves":[["const",1],["piecewise",[[1,1],[4,0.25]]],["geometric",0.5]]})");
  const auto again = parse_chain_spec(chain_spec_to_json(spec).dump());
  CHECK(chain_spec_to_json(again) == chain_spec_to_json(spec));
  CHECK_THROWS_AS(curve_from_json(Json::parse(R"(["harmonic_to", 0.7])")), SpecError);
  CHECK_THROWS_AS(curve_from_json(Json::parse(R"(["geometric", 1.5])")), SpecError);

  const Operator op = Operator::diagonal({0.25, 1.0});
  CHECK(dist(operator_from_json(operator_to_json(op)).matrix(), op.matrix()) == 0.0);
}

TEST_CASE("format_double round trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(0.0) == "0");
}
