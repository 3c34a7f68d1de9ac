#include "contraction_lab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>

#include <CLI11.hpp>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/errors.hpp"
#include "contraction_lab/gap.hpp"
#include "contraction_lab/io.hpp"
#include "contraction_lab/nonexample.hpp"
#include "contraction_lab/products.hpp"
#include "contraction_lab/verify.hpp"

namespace contraction_lab {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec_path;
  std::optional<int> horizon;
  int n_max = 30;
  std::optional<double> epsilon;
  std::vector<double> grid;
  int seeds = 10;
  std::vector<long> dims;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  double cauchy_tol = 1e-8;
  bool inject_fault = false;
  Tolerances tol;
};

std::optional<std::uint64_t> resolve_seed(const Options& opt) {
  if (opt.seed) return opt.seed;
  const char* env = std::getenv("CONTRACTION_LAB_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end) {
    throw UsageError(std::string("CONTRACTION_LAB_SEED is not a non-negative integer: ") + env);
  }
  return value;
}

/// Reads the spec, filling in the seed and horizon from flags when the
/// document leaves them out.
ChainSpec load_spec(const Options& opt) {
  if (opt.spec_path.empty()) throw UsageError("--spec is required");
  std::string text;
  try {
    text = read_text_file(opt.spec_path);
  } catch (const LabError& e) {
    throw UsageError(e.what());
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("malformed JSON in ") + opt.spec_path + ": " + e.what());
  }
  if (doc.is_object()) {
    if (!doc.contains("seed")) {
      if (const auto seed = resolve_seed(opt)) doc["seed"] = *seed;
    }
    if (!doc.contains("horizon") && opt.horizon && *opt.horizon >= 1) doc["horizon"] = *opt.horizon;
  }
  return parse_chain_spec(doc.dump());
}

int resolve_horizon(const Options& opt, const ContractionChain& chain) {
  const int horizon = opt.horizon.value_or(chain.horizon());
  if (horizon < 1 || horizon > chain.horizon()) {
    throw UsageError("--horizon " + std::to_string(horizon) + " outside [1, " +
                     std::to_string(chain.horizon()) + "]");
  }
  return horizon;
}

fs::path prepare_out(const Options& opt) {
  const fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw LabError("cannot create output directory " + dir.string());
  return dir;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json tolerances_json(const Tolerances& tol, Eigen::Index dim) {
  return Json{{"eig", tol.eig}, {"psd", tol.psd(dim)}, {"fix", tol.fix},
              {"chain", tol.chain(dim)}, {"rate", tol.rate}};
}

Json sparse(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 0.0) out.push_back({i + 1, v[i].real()});
  }
  return out;
}

std::string_view scope_name(CertificateScope scope) {
  return scope == CertificateScope::Analytic ? "analytic" : "empirical";
}

Json trajectory_json(const std::vector<RankStep>& steps) {
  Json out = Json::array();
  for (const auto& s : steps) out.push_back({{"n", s.n}, {"rank", s.rank}, {"delta_k", s.delta}});
  return out;
}

// simulate

int cmd_simulate(const Options& opt, std::ostream& out) {
  const auto spec = load_spec(opt);
  const auto chain = build_chain(spec, opt.tol);
  const int horizon = resolve_horizon(opt, chain);
  const auto dir = prepare_out(opt);
  const auto& tol = opt.tol;

  const auto invariants = check_chain_invariants(chain, tol);
  const auto limit = limit_operator(chain);
  const auto projection = fixed_point_projection(limit.op, tol);
  const auto probes = default_probes(projection, chain.seed());
  const auto trace = iterate_products(chain, probes, horizon, tol);
  const auto convergence = check_projection_convergence(chain, horizon, probes, tol);
  const auto differences = consecutive_difference_report(trace, tol);

  CsvWriter csv({"n", "probe_id", "sot_err", "adj_err", "consec_diff", "a_n", "b_n", "wot_err",
                 "opnorm_err"});
  for (const auto& r : trace.rows) {
    csv.add_row({std::to_string(r.n), std::to_string(r.probe_id), format_double(r.sot_err),
                 format_double(r.adj_err), cell(r.consec_diff),
                 r.a_n ? format_double(r.a_n->real()) : std::string(), format_double(r.b_n),
                 format_double(r.wot_err), format_double(r.opnorm_err)});
  }
  write_text_file(dir / "trace.csv", csv.str());

  const bool empirical = limit.provenance == LimitProvenance::Empirical;
  const bool inconclusive = empirical && limit.cauchy_gap > opt.cauchy_tol;
  const bool failed = !invariants.ok || !convergence.ok() || !differences.ok();
  const char* status = failed ? "fail" : inconclusive ? "inconclusive" : "pass";

  Json finals = Json::array();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& r = trace.final_row(static_cast<int>(i));
    finals.push_back({{"probe_id", r.probe_id}, {"sot_err", r.sot_err}, {"adj_err", r.adj_err},
                      {"wot_err", r.wot_err}});
  }
  Json summary{
      {"command", "simulate"},
      {"chain", chain_spec_to_json(spec)},
      {"horizon", horizon},
      {"tolerances", tolerances_json(tol, chain.dim())},
      {"limit",
       {{"provenance", empirical ? "empirical" : "analytic"},
        {"cauchy_gap", limit.cauchy_gap},
        {"cauchy_tolerance", opt.cauchy_tol},
        {"fixed_rank", projection.rank}}},
      {"probes", probes.size()},
      {"final", {{"n", horizon}, {"opnorm_err", trace.final_row(0).opnorm_err}, {"per_probe", finals}}},
      {"verdicts",
       {{"chain_invariants", {{"ok", invariants.ok}, {"first_bad_n", invariants.first_bad_n},
                              {"what", invariants.what}}},
        {"projection_convergence",
         {{"ok", convergence.ok()}, {"ranks_nonincreasing", convergence.ranks_nonincreasing},
          {"final_rank_dominates", convergence.final_rank_dominates},
          {"limit_rank", convergence.limit_rank}}},
        {"consecutive_differences",
         {{"ok", differences.ok()}, {"b_nonincreasing", differences.b_nonincreasing},
          {"worst_slack", differences.worst_slack},
          {"max_identity_residual", differences.max_identity_residual}}}}},
      {"status", status}};
  write_text_file(dir / "summary.json", dump_json(summary));

  out << "simulate: " << kind_name(chain.kind()) << " dim " << chain.dim() << " horizon " << horizon
      << " opnorm_err " << format_double(trace.final_row(0).opnorm_err) << " -> " << status << "\n";
  if (failed) return kExitVerdictFailure;
  return inconclusive ? kExitInconclusive : kExitPass;
}

// gap

int cmd_gap(const Options& opt, std::ostream& out) {
  const auto spec = load_spec(opt);
  const auto chain = build_chain(spec, opt.tol);
  const int horizon = resolve_horizon(opt, chain);
  const auto& grid = opt.grid.empty() ? kDefaultDeltaGrid : opt.grid;
  const double epsilon = opt.epsilon.value_or(1e-3);
  if (!(epsilon >= 0.0)) throw UsageError("--epsilon must be >= 0");

  CertificateSearchResult result;
  try {
    result = certificate_search(chain, horizon, grid, opt.tol);
  } catch (const PreconditionError& e) {
    if (e.reason() == PreconditionError::Reason::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  const auto dir = prepare_out(opt);

  if (!result.found()) {
    const auto& f = *result.failure;
    std::error_code ec;
    fs::remove(dir / "certificate.json", ec);
    fs::remove(dir / "rate_table.csv", ec);
    Json hits = Json::array();
    for (const auto& h : f.hits) {
      hits.push_back({{"n", h.n}, {"top_below_one", h.top_below_one}, {"hits_finest", h.hits_finest}});
    }
    Json report{{"command", "gap"},
                {"chain", chain_spec_to_json(spec)},
                {"grid", grid},
                {"failed_at", f.failed_at},
                {"offending_eigenvalue", f.offending_eigenvalue},
                {"message", f.message},
                {"rank_trajectory", trajectory_json(f.rank_trajectory)},
                {"per_n", hits}};
    write_text_file(dir / "gap_failure.json", dump_json(report));
    out << "gap: no certificate (" << f.message << ")\n";
    return kExitNoCertificate;
  }

  const auto& cert = *result.certificate;
  std::error_code ec;
  fs::remove(dir / "gap_failure.json", ec);

  const auto projection = fixed_point_projection(limit_operator(chain).op, opt.tol);
  const auto probes = default_probes(projection, chain.seed());
  CsvWriter csv({"probe_id", "j", "lhs", "rhs", "slack"});
  Json checks = Json::array();
  bool all_hold = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto id = static_cast<int>(i);
    try {
      const auto table = rate_bound_check(chain, cert, probes[i], epsilon, std::nullopt,
                                          std::nullopt, opt.tol);
      for (const auto& row : table.rows) {
        csv.add_row({std::to_string(id), std::to_string(row.j), format_double(row.lhs),
                     format_double(row.rhs), format_double(row.slack)});
      }
      all_hold = all_hold && table.all_hold;
      checks.push_back({{"probe_id", id}, {"n0", table.n0}, {"epsilon", table.epsilon},
                        {"eta_prime_norm", table.eta_prime_norm}, {"split_error", table.split_error},
                        {"fitted_slope", nullable(table.fitted_slope)}, {"fitted_points", table.fitted_points},
                        {"rate_reference", std::log(1.0 - cert.delta)}, {"all_hold", table.all_hold}});
    } catch (const PreconditionError& e) {
      if (e.reason() != PreconditionError::Reason::OutOfScope) throw;
      checks.push_back({{"probe_id", id}, {"skipped", e.what()}});
    }
  }
  write_text_file(dir / "rate_table.csv", csv.str());

  Json certificate{{"delta", cert.delta},
                   {"N", cert.N},
                   {"scope", scope_name(cert.scope)},
                   {"verified_horizon", cert.verified_horizon},
                   {"rank_trajectory", trajectory_json(cert.rank_trajectory)},
                   {"chain", chain_spec_to_json(spec)},
                   {"grid", grid},
                   {"rate_checks", checks},
                   {"rate_bound_holds", all_hold}};
  write_text_file(dir / "certificate.json", dump_json(certificate));

  out << "gap: delta " << format_double(cert.delta) << " N " << cert.N << " scope "
      << scope_name(cert.scope) << " rate bound " << (all_hold ? "holds" : "VIOLATED") << "\n";
  return all_hold ? kExitPass : kExitVerdictFailure;
}

// nonexample

std::vector<int> net_ladder(int n_max) {
  std::vector<int> values;
  for (int v : {2, 5, 10, 20, 30, 50, 100, 200, 500, 1000}) {
    if (v < n_max) values.push_back(v);
  }
  values.push_back(n_max);
  return values;
}

int cmd_nonexample(const Options& opt, std::ostream& out) {
  if (opt.n_max < 2) throw UsageError("--nmax must be >= 2");
  const double epsilon = opt.epsilon.value_or(0.5);
  if (!(epsilon > 0.0)) throw UsageError("--epsilon must be > 0");
  const auto dir = prepare_out(opt);

  const auto seq = build_nonexample(opt.n_max);
  const auto steps = verify_step_distances(seq);
  const auto conditions = verify_sequence_conditions(seq, opt.n_max - 1);
  const auto givens = givens_factorization(seq);
  const auto givens_check = verify_givens(seq, givens);
  const auto nets = verify_not_totally_bounded(net_ladder(opt.n_max), epsilon);

  Json vectors = Json::array();
  for (const auto& v : seq.vectors) {
    vectors.push_back({{"m", v.m}, {"n", v.n}, {"j", v.j}, {"coords", sparse(v.coords)}});
  }
  write_text_file(dir / "sequence.json",
                  dump_json({{"n_max", seq.n_max}, {"ambient_dim", seq.ambient_dim},
                             {"size", seq.size()}, {"vectors", vectors}}));

  Json rotations = Json::array();
  for (const auto& g : givens) {
    rotations.push_back({{"m", g.m}, {"angle", g.angle}, {"identity", g.identity},
                         {"plane_u", sparse(g.plane_u)}, {"plane_v", sparse(g.plane_v)}});
  }
  const Json givens_verdict{{"ok", givens_check.ok()},
                            {"max_unitarity_error", givens_check.max_unitarity_error},
                            {"max_step_error", givens_check.max_step_error},
                            {"max_reconstruction_error", givens_check.max_reconstruction_error},
                            {"ranks_ok", givens_check.ranks_ok},
                            {"identity_steps", givens_check.identity_steps}};
  write_text_file(dir / "givens.json",
                  dump_json({{"steps", rotations}, {"verification", givens_verdict}}));

  CsvWriter step_csv({"m", "n", "j", "kind", "measured", "expected", "matches"});
  for (const auto& s : steps.steps) {
    step_csv.add_row({std::to_string(s.m), std::to_string(s.n), std::to_string(s.j),
                      s.kind == StepKind::WithinRow ? "within_row" : "cross_row",
                      format_double(s.measured), format_double(s.expected), s.matches ? "1" : "0"});
  }
  write_text_file(dir / "step_distances.csv", step_csv.str());

  CsvWriter net_csv({"N_max", "epsilon", "net_size"});
  for (const auto& r : nets.rows) {
    net_csv.add_row({std::to_string(r.n_max), format_double(r.epsilon), std::to_string(r.net_size)});
  }
  write_text_file(dir / "net_growth.csv", net_csv.str());

  const bool net_ok = !nets.lower_bound_asserted || nets.lower_bound_ok;
  const bool ok = steps.within_row_ok && conditions.ok() && givens_check.ok() && net_ok;
  Json summary{
      {"command", "nonexample"},
      {"n_max", seq.n_max},
      {"size", seq.size()},
      {"givens_steps", givens.size()},
      {"step_distances", {{"within_row_ok", steps.within_row_ok}, {"cross_row_ok", steps.cross_row_ok}}},
      {"conditions",
       {{"ok", conditions.ok()}, {"weak_null_ok", conditions.weak_null_ok}, {"min_norm", conditions.min_norm},
        {"max_norm", conditions.max_norm}, {"norms_nonincreasing", conditions.norms_nonincreasing},
        {"tails_ok", conditions.tails_ok}}},
      {"givens", givens_verdict},
      {"net_growth",
       {{"epsilon", epsilon}, {"lower_bound_asserted", nets.lower_bound_asserted},
        {"lower_bound_ok", nets.lower_bound_ok}, {"strictly_increasing", nets.strictly_increasing},
        {"final_net_size", nets.rows.back().net_size}}},
      {"status", ok ? "pass" : "fail"}};
  write_text_file(dir / "nonexample_summary.json", dump_json(summary));

  out << "nonexample: N_max " << seq.n_max << ", " << seq.size() << " vectors, " << givens.size()
      << " Givens steps, net size " << nets.rows.back().net_size << " at epsilon "
      << format_double(epsilon) << " -> " << (ok ? "pass" : "fail") << "\n";
  return ok ? kExitPass : kExitVerdictFailure;
}

// verify

/// Eigenvalues rise from 1/2 to 4/5 after the first step.
ContractionChain faulty_chain() {
  std::vector<Operator> ops{Operator::diagonal({0.5, 0.5})};
  for (int n = 2; n <= 4; ++n) ops.push_back(Operator::diagonal({0.8, 0.8}));
  return ContractionChain(ChainKind::Custom, std::move(ops), 0);
}

int cmd_verify(const Options& opt, std::ostream& out) {
  if (opt.seeds < 1) throw UsageError("--seeds must be >= 1 (empty corpus)");
  VerifyConfig config;
  config.seeds = opt.seeds;
  config.tol = opt.tol;
  if (opt.horizon) {
    if (*opt.horizon < 2) throw UsageError("--horizon must be >= 2");
    config.horizon = *opt.horizon;
  }
  if (!opt.dims.empty()) {
    config.dims.clear();
    for (long d : opt.dims) {
      if (d < 1) throw UsageError("--dims entries must be positive");
      config.dims.push_back(d);
    }
  }
  if (opt.inject_fault) config.extra_chains.push_back(faulty_chain());
  const auto dir = prepare_out(opt);

  const auto report = run_property_suite(config);
  Json properties = Json::array();
  for (const auto& p : report.properties) {
    properties.push_back({{"name", p.name}, {"cases", p.cases}, {"failures", p.failures},
                          {"skipped", p.skipped}, {"passed", p.passed()},
                          {"first_failure", p.first_failure}});
    out << (p.passed() ? "PASS " : "FAIL ") << p.name << " (" << p.cases << " cases, "
        << p.failures << " failures)\n";
  }
  Json dims = Json::array();
  for (auto d : config.dims) dims.push_back(d);
  write_text_file(dir / "verify.json",
                  dump_json({{"command", "verify"}, {"seeds", config.seeds}, {"dims", dims},
                             {"horizon", config.horizon}, {"fault_injected", opt.inject_fault},
                             {"properties", properties}, {"passed", report.passed()}}));
  return report.passed() ? kExitPass : kExitVerdictFailure;
}

void add_tolerance_flags(CLI::App& cmd, Options& opt) {
  cmd.add_option("--tol-eig", opt.tol.eig, "Eigenvalue clustering tolerance")->capture_default_str();
  cmd.add_option("--tol-psd", opt.tol.psd_per_dim, "Loewner-order tolerance per dimension")
      ->capture_default_str();
  cmd.add_option("--tol-fix", opt.tol.fix, "Fixed-vector residual tolerance")->capture_default_str();
  cmd.add_option("--tol-chain", opt.tol.chain_per_dim, "Chain ordering tolerance per dimension")
      ->capture_default_str();
  cmd.add_option("--tol-rate", opt.tol.rate, "Rate-bound slack")->capture_default_str();
}

void add_chain_flags(CLI::App& cmd, Options& opt) {
  cmd.add_option("--spec", opt.spec_path, "Chain spec JSON")->required();
  cmd.add_option("--horizon", opt.horizon, "Steps to run (default: chain horizon)");
  cmd.add_option("--seed", opt.seed, "Seed when the spec has none (else $CONTRACTION_LAB_SEED)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Products of decreasing positive contractions: simulation and diagnostics",
               "contraction-lab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  auto* simulate = app.add_subcommand("simulate", "Iterate S_n = T_n...T_1 and write convergence traces");
  add_chain_flags(*simulate, opt);
  simulate->add_option("--cauchy-tol", opt.cauchy_tol, "Largest acceptable Cauchy gap of an empirical limit")
      ->capture_default_str();

  auto* gap = app.add_subcommand("gap", "Search for a uniform spectral gap certificate");
  add_chain_flags(*gap, opt);
  gap->add_option("--grid", opt.grid, "Descending delta grid, comma separated")->delimiter(',');
  gap->add_option("--epsilon", opt.epsilon, "Rate-bound epsilon (default 1e-3)");

  auto* nonexample = app.add_subcommand("nonexample", "Build and check the rotating sequence");
  nonexample->add_option("--nmax", opt.n_max, "Number of rows")->capture_default_str();
  nonexample->add_option("--epsilon", opt.epsilon, "Net radius (default 0.5)");

  auto* verify = app.add_subcommand("verify", "Run the seeded property suite");
  verify->add_option("--seeds", opt.seeds, "Seeds per dimension")->capture_default_str();
  verify->add_option("--dims", opt.dims, "Dimensions, comma separated (default 2,4,8)")->delimiter(',');
  verify->add_option("--horizon", opt.horizon, "Chain horizon (default 60)");
  verify->add_flag("--inject-fault", opt.inject_fault, "Add a chain that breaks ordering")->group("");

  for (auto* cmd : {simulate, gap, nonexample, verify}) {
    cmd->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    add_tolerance_flags(*cmd, opt);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(opt, out);
    if (*gap) return cmd_gap(opt, out);
    if (*nonexample) return cmd_nonexample(opt, out);
    return cmd_verify(opt, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SpecError& e) {
    err << "invalid chain spec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ChainError& e) {
    err << "invalid chain: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitVerdictFailure;
  }
}

}  // namespace contraction_lab
