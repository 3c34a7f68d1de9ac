#include "contraction_lab/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "contraction_lab/errors.hpp"
#include "contraction_lab/gap.hpp"
#include "contraction_lab/products.hpp"
#include "contraction_lab/random.hpp"

namespace contraction_lab {

bool VerifyReport::passed() const noexcept {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed(); });
}

namespace {

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct SpectralFrame {
  Matrix basis;
  std::vector<double> values;

  Operator op() const {
    RealVector d(static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) d[static_cast<Eigen::Index>(k)] = values[k];
    return Operator(basis * d.cast<Complex>().asDiagonal() * basis.adjoint());
  }
};

/// `ones` eigenvalues equal to 1 (the first columns of the basis), the rest uniform in [lo, hi].
SpectralFrame random_frame(Rng& rng, Eigen::Index dim, int ones, double lo, double hi) {
  SpectralFrame f{random_unitary(rng, dim), {}};
  for (Eigen::Index k = 0; k < dim; ++k) f.values.push_back(k < ones ? 1.0 : uniform(rng, lo, hi));
  return f;
}

Matrix column_projection(const Matrix& basis, int first, int count) {
  const Matrix cols = basis.middleCols(first, count);
  return cols * cols.adjoint();
}

Operator schur_step(const Operator& t, const Matrix& d) {
  const Matrix root = operator_sqrt(t).matrix();
  return Operator(root * (Matrix::Identity(t.dim(), t.dim()) - d) * root);
}

EigenCurve random_curve(Rng& rng) {
  switch (uniform_int(rng, 0, 4)) {
    case 0:
      return EigenCurve::constant(1.0);
    case 1:
      return EigenCurve::constant(uniform(rng, 0.0, 0.9));
    case 2:
      return EigenCurve::harmonic_to(uniform(rng, 0.05, 0.45));
    case 3:
      return EigenCurve::geometric(uniform(rng, 0.5, 0.99));
    default:
      return EigenCurve::piecewise({{1, 1.0}, {uniform_int(rng, 2, 20), uniform(rng, 0.0, 0.9)}});
  }
}

PropertyResult named(std::string name) {
  PropertyResult result;
  result.name = std::move(name);
  return result;
}

void record(PropertyResult& result, bool ok, const std::string& context) {
  ++result.cases;
  if (!ok) {
    if (result.failures == 0) result.first_failure = context;
    ++result.failures;
  }
}

std::string label(Eigen::Index dim, int seed) {
  return "dim " + std::to_string(dim) + " seed " + std::to_string(seed);
}

constexpr std::array<ChainKind, 5> kKinds{ChainKind::Diagonal, ChainKind::SchurDecrement,
                                          ChainKind::ConjugatedDiagonal, ChainKind::GapEngineered,
                                          ChainKind::NearOneAccumulating};

}  // namespace

FixedVectorCase sample_fixed_vector_case(std::uint64_t seed, Eigen::Index dim) {
  auto rng = make_rng(mix(seed, 11));
  const int mode = uniform_int(rng, 0, 2);
  const int ones = mode == 1 ? uniform_int(rng, 0, static_cast<int>(dim))
                             : uniform_int(rng, 1, static_cast<int>(dim));
  const auto frame = random_frame(rng, dim, ones, 0.0, 0.95);
  const Operator t = frame.op();

  Vector fixed = Vector::Zero(dim);
  for (int k = 0; k < ones; ++k) fixed += frame.basis.col(k) * Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  if (mode == 0) return {t, fixed};
  if (mode == 1) return {t, random_unit_vector(rng, dim)};

  // Fixed vector plus a visible component in range(P)^perp.
  if (ones == dim) return {t, fixed};
  Vector perp = Vector::Zero(dim);
  for (Eigen::Index k = ones; k < dim; ++k) {
    perp += frame.basis.col(k) * Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  }
  const double c = std::pow(10.0, uniform(rng, -2.0, 0.0));
  const double fixed_norm = std::max(fixed.norm(), 1e-300);
  return {t, fixed / fixed_norm + c * perp / perp.norm()};
}

OrderedPair sample_schur_pair(std::uint64_t seed, Eigen::Index dim) {
  auto rng = make_rng(mix(seed, 23));
  const int ones = uniform_int(rng, 0, static_cast<int>(dim));
  const auto frame = random_frame(rng, dim, ones, 0.0, 1.0);
  const Operator t = frame.op();
  Matrix d = random_positive_contraction(rng, dim).matrix();
  if (ones > 0 && uniform_int(rng, 0, 1) == 1) {
    // D vanishes on a subspace of range(P); that part stays fixed in Tp.
    const int keep = uniform_int(rng, 1, ones);
    const Matrix q = Matrix::Identity(dim, dim) - column_projection(frame.basis, 0, keep);
    d = q * d * q;
  }
  return {schur_step(t, d), t};
}

GapViolationCase sample_gap_violation(std::uint64_t seed, Eigen::Index dim) {
  auto rng = make_rng(mix(seed, 37));
  static constexpr std::array<double, 4> kDeltas{0.05, 0.1, 0.2, 0.3};
  const double delta = kDeltas[static_cast<std::size_t>(uniform_int(rng, 0, 3))];
  const int ones = uniform_int(rng, 1, static_cast<int>(dim));
  const auto frame = random_frame(rng, dim, ones, 0.0, 1.0 - delta);
  const Operator t = frame.op();

  Vector v = Vector::Zero(dim);
  for (int k = 0; k < ones; ++k) v += frame.basis.col(k) * Complex(uniform(rng, -1, 1), uniform(rng, -1, 1));
  v /= v.norm();
  const double c = uniform(rng, 0.1 * delta, 0.9 * delta);
  const Matrix q = Matrix::Identity(dim, dim) - column_projection(frame.basis, 0, ones);
  const Matrix d = c * v * v.adjoint() + 0.5 * q * random_positive_contraction(rng, dim).matrix() * q;
  return {t, schur_step(t, d), delta};
}

ContractionChain sample_chain(ChainKind kind, Eigen::Index dim, std::uint64_t seed, int horizon) {
  auto rng = make_rng(mix(seed, 53 + static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case ChainKind::Diagonal:
    case ChainKind::ConjugatedDiagonal: {
      std::vector<EigenCurve> curves;
      for (Eigen::Index k = 0; k < dim; ++k) curves.push_back(random_curve(rng));
      return kind == ChainKind::Diagonal ? diagonal_chain(curves, horizon)
                                         : conjugated_diagonal_chain(curves, horizon, seed);
    }
    case ChainKind::SchurDecrement: {
      ChainSpec spec;
      spec.kind = kind;
      spec.dim = dim;
      spec.horizon = horizon;
      spec.seed = seed;
      spec.fixed_rank = uniform_int(rng, 0, static_cast<int>(dim) - 1);
      return build_chain(spec);
    }
    case ChainKind::GapEngineered:
      return gap_engineered_chain(dim, 0.1, static_cast<int>(seed % static_cast<std::uint64_t>(dim + 1)),
                                  seed, horizon);
    case ChainKind::NearOneAccumulating:
      return near_one_accumulating_chain(dim, seed, horizon);
    case ChainKind::Custom:
      break;
  }
  throw PreconditionError(PreconditionError::Reason::InvalidArgument, "cannot sample custom chains");
}

VerifyReport run_property_suite(const VerifyConfig& config) {
  if (config.seeds < 1 || config.dims.empty()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "property suite needs at least one seed and one dimension");
  }
  const Tolerances& tol = config.tol;

  auto equivalence = named("fixed_vector_equivalence");
  auto monotone = named("projection_monotone");
  auto partial_order = named("loewner_partial_order");
  auto reconstruction = named("spectral_reconstruction");
  auto invariants = named("chain_invariants");
  auto projections = named("fixed_projection_nonincreasing");
  auto an_bn = named("an_bn_chain");
  auto descent = named("rank_strict_descent");
  auto gap_monotone = named("gap_monotone_in_delta");
  auto trajectory = named("certificate_rank_trajectory");

  std::vector<std::pair<std::string, ContractionChain>> chains;

  for (Eigen::Index dim : config.dims) {
    for (int seed = 0; seed < config.seeds; ++seed) {
      const auto base = static_cast<std::uint64_t>(seed) * 1000 + static_cast<std::uint64_t>(dim);
      const std::string where = label(dim, seed);

      for (int i = 0; i < 10; ++i) {
        const auto c = sample_fixed_vector_case(mix(base, static_cast<std::uint64_t>(i)), dim);
        const auto report = check_fixed_vector_equivalence(c.t, c.xi, tol);
        if (report.ambiguous) {
          ++equivalence.skipped;
          continue;
        }
        record(equivalence, report.agree(), where + " case " + std::to_string(i));
      }

      for (int i = 0; i < 5; ++i) {
        const auto pair = sample_schur_pair(mix(base, 100 + static_cast<std::uint64_t>(i)), dim);
        record(monotone, check_projection_monotone(pair.lower, pair.upper, tol),
               where + " pair " + std::to_string(i));
      }

      {
        const auto p1 = sample_schur_pair(mix(base, 200), dim);
        auto rng = make_rng(mix(base, 201));
        const Operator t3 = schur_step(p1.lower, random_positive_contraction(rng, dim).matrix());
        const bool reflexive = loewner_leq(p1.upper, p1.upper, tol).holds;
        const bool transitive = loewner_leq(t3, p1.upper, tol).holds;
        const bool both = loewner_leq(p1.lower, p1.upper, tol).holds &&
                          loewner_leq(p1.upper, p1.lower, tol).holds;
        const bool antisymmetric =
            !both || operator_norm((p1.upper - p1.lower).matrix()) <= 1e-8;
        record(partial_order, reflexive && transitive && antisymmetric, where);
      }

      {
        auto rng = make_rng(mix(base, 300));
        const Matrix g = random_unitary(rng, dim);
        const Operator a(g * RealVector::Random(dim).cast<Complex>().asDiagonal() * g.adjoint());
        const auto spec = spectral_decompose(a);
        const double err = operator_norm(spec.reconstruct() - a.matrix());
        const double ortho = operator_norm(spec.eigenvectors.adjoint() * spec.eigenvectors -
                                           Matrix::Identity(dim, dim));
        const bool ascending = std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end());
        record(reconstruction, err <= 1e-12 * dim && ortho <= 1e-12 * dim && ascending, where);
      }

      for (int i = 0; i < 3; ++i) {
        const auto c = sample_gap_violation(mix(base, 400 + static_cast<std::uint64_t>(i)), dim);
        record(descent, rank_strict_descent_check(c.t, c.tp, c.delta, tol),
               where + " case " + std::to_string(i));
      }

      {
        auto rng = make_rng(mix(base, 500));
        const auto spec = spectral_decompose(random_positive_contraction(rng, dim));
        bool ok = true;
        for (std::size_t a = 0; a < kDefaultDeltaGrid.size(); ++a) {
          for (std::size_t b = a; b < kDefaultDeltaGrid.size(); ++b) {
            if (has_gap_at(spec.eigenvalues, kDefaultDeltaGrid[a], tol) &&
                !has_gap_at(spec.eigenvalues, kDefaultDeltaGrid[b], tol)) {
              ok = false;
            }
          }
        }
        record(gap_monotone, ok, where);
      }

      for (ChainKind kind : kKinds) {
        if (kind == ChainKind::NearOneAccumulating && dim < 2) continue;
        chains.emplace_back(std::string(kind_name(kind)) + " " + where,
                            sample_chain(kind, dim, static_cast<std::uint64_t>(seed), config.horizon));
      }
    }
  }
  for (const auto& extra : config.extra_chains) {
    chains.emplace_back("extra " + std::string(kind_name(extra.kind())), extra);
  }

  for (const auto& [name, chain] : chains) {
    const auto inv = check_chain_invariants(chain, tol);
    record(invariants, inv.ok, name + ": " + inv.what);

    bool projections_ok = true;
    Projection previous = fixed_point_projection(chain.operator_at(1), tol);
    for (int n = 2; n <= chain.horizon() && projections_ok; ++n) {
      Projection current = fixed_point_projection(chain.operator_at(n), tol);
      projections_ok = loewner_leq(current.op, previous.op, tol).holds;
      previous = std::move(current);
    }
    record(projections, projections_ok, name);

    const int horizon = std::max(1, chain.horizon() - 1);
    const auto p = fixed_point_projection(limit_operator(chain).op, tol);
    const auto trace = iterate_products(chain, default_probes(p, chain.seed()), horizon, tol);
    const auto report = consecutive_difference_report(trace, tol);
    const bool norms_ok = std::all_of(trace.product_norms.begin(), trace.product_norms.end(),
                                      [&](double v) { return v <= 1.0 + tol.psd(chain.dim()); });
    record(an_bn, report.ok() && norms_ok, name);
  }

  for (Eigen::Index dim : config.dims) {
    for (int seed = 0; seed < config.seeds; ++seed) {
      const auto s = static_cast<std::uint64_t>(seed);
      const auto fixed_rank = static_cast<int>(s % static_cast<std::uint64_t>(dim + 1));
      const auto chain = gap_engineered_chain(dim, 0.1, fixed_rank, s, config.horizon);
      const auto result = certificate_search(chain, chain.horizon(), kDefaultDeltaGrid, tol);
      bool ok = result.found() && result.certificate->delta >= 0.1 && result.certificate->N == 1;
      if (ok) {
        const auto& traj = result.certificate->rank_trajectory;
        const int d = traj.front().rank;
        for (std::size_t i = 1; i < traj.size(); ++i) ok = ok && traj[i].rank < traj[i - 1].rank;
        ok = ok && static_cast<int>(traj.size()) <= d + 1;
      }
      record(trajectory, ok, "gap_engineered " + label(dim, seed));
    }
  }

  return {{equivalence, monotone, partial_order, reconstruction, invariants, projections, an_bn,
           descent, gap_monotone, trajectory}};
}

}  // namespace contraction_lab
