#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "contraction_lab/cli.hpp"
#include "contraction_lab/io.hpp"

using namespace contraction_lab;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;

  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("contraction_lab_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  std::string spec(const std::string& name, const std::string& body) const {
    const auto path = dir / (name + ".json");
    write_text_file(path, body);
    return path.string();
  }
  std::string out(const std::string& name) const { return (dir / name).string(); }
  Json json(const std::string& sub, const std::string& file) const {
    return Json::parse(read_text_file(dir / sub / file));
  }
};

int run(std::vector<std::string> args, std::string* stdout_text = nullptr) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  if (stdout_text) *stdout_text = out.str();
  return code;
}

const char* kTelescoping =
    R"({"kind":"diagonal","dim":2,"horizon":60,"curves":[["const",1],["harmonic_to",0.5]]})";

}  // namespace

TEST_CASE("cli simulate: telescoping summary") {
  Scratch s("sim_tele");
  const auto spec = s.spec("tele", kTelescoping);
  REQUIRE(run({"simulate", "--spec", spec, "--horizon", "50", "--out", s.out("o")}) == kExitPass);
  const auto summary = s.json("o", "summary.json");
  CHECK(summary["status"] == "pass");
  CHECK(summary["limit"]["provenance"] == "analytic");
  // Probe 1 is e2.
  const double sot = summary["final"]["per_probe"][1]["sot_err"].get<double>();
  CHECK(sot == doctest::Approx(51.0 / std::pow(2.0, 50)).epsilon(1e-10));

  const auto csv = read_text_file(fs::path(s.out("o")) / "trace.csv");
  CHECK(csv.rfind("n,probe_id,sot_err,adj_err,consec_diff,a_n,b_n,wot_err,opnorm_err\n", 0) == 0);
}

TEST_CASE("cli simulate: identity chain has zero errors") {
  Scratch s("sim_id");
  const auto spec = s.spec("id", R"({"kind":"diagonal","dim":3,"horizon":10,"curves":[["const",1],["const",1],["const",1]]})");
  REQUIRE(run({"simulate", "--spec", spec, "--out", s.out("o")}) == kExitPass);
  const auto summary = s.json("o", "summary.json");
  CHECK(summary["final"]["opnorm_err"].get<double>() == 0.0);
  for (const auto& p : summary["final"]["per_probe"]) CHECK(p["sot_err"].get<double>() == 0.0);
}

TEST_CASE("cli simulate: usage errors") {
  Scratch s("sim_usage");
  const auto spec = s.spec("tele", kTelescoping);
  CHECK(run({"simulate", "--spec", spec, "--horizon", "61", "--out", s.out("o")}) == kExitUsage);
  CHECK(run({"simulate", "--spec", s.spec("bad", R"({"kind":"diagonal"})"), "--out", s.out("o")}) == kExitUsage);
  CHECK(run({"simulate", "--spec", s.spec("broken", "{"), "--out", s.out("o")}) == kExitUsage);
  CHECK(run({"simulate", "--spec", (s.dir / "missing.json").string()}) == kExitUsage);
  CHECK(run({"simulate"}) == kExitUsage);
  CHECK(run({}) == kExitUsage);
  CHECK(run({"frobnicate"}) == kExitUsage);
  CHECK(run({"--help"}) == kExitPass);
}

TEST_CASE("cli simulate: seed from flag or environment") {
  Scratch s("sim_seed");
  const auto spec = s.spec("schur", R"({"kind":"schur_decrement","dim":3,"horizon":30})");
  ::unsetenv("CONTRACTION_LAB_SEED");
  CHECK(run({"simulate", "--spec", spec, "--out", s.out("a")}) == kExitUsage);
  CHECK(run({"simulate", "--spec", spec, "--seed", "5", "--out", s.out("a")}) != kExitUsage);
  ::setenv("CONTRACTION_LAB_SEED", "5", 1);
  CHECK(run({"simulate", "--spec", spec, "--out", s.out("b")}) != kExitUsage);
  ::setenv("CONTRACTION_LAB_SEED", "five", 1);
  CHECK(run({"simulate", "--spec", spec, "--out", s.out("c")}) == kExitUsage);
  ::unsetenv("CONTRACTION_LAB_SEED");
  CHECK(read_text_file(fs::path(s.out("a")) / "trace.csv") ==
        read_text_file(fs::path(s.out("b")) / "trace.csv"));
}

TEST_CASE("cli simulate: inconclusive when the empirical limit has not settled") {
  Scratch s("sim_inconclusive");
  const auto spec = s.spec("schur", R"({"kind":"schur_decrement","dim":4,"horizon":6,"seed":2,"decay":1.0})");
  CHECK(run({"simulate", "--spec", spec, "--out", s.out("o")}) == kExitInconclusive);
  CHECK(s.json("o", "summary.json")["status"] == "inconclusive");
}

TEST_CASE("cli gap: certificate and rate table") {
  Scratch s("gap_cert");
  const auto spec = s.spec("ge", R"({"kind":"gap_engineered","dim":4,"horizon":100,"seed":3,"delta":0.1,"fixed_rank":1})");
  REQUIRE(run({"gap", "--spec", spec, "--out", s.out("o")}) == kExitPass);
  const auto cert = s.json("o", "certificate.json");
  CHECK(cert["delta"].get<double>() == 0.1);
  CHECK(cert["N"] == 1);
  CHECK(cert["rank_trajectory"][0]["delta_k"].get<double>() == 0.1);
  const auto csv = read_text_file(fs::path(s.out("o")) / "rate_table.csv");
  CHECK(csv.rfind("probe_id,j,lhs,rhs,slack\n", 0) == 0);
}

TEST_CASE("cli gap: custom grid") {
  Scratch s("gap_grid");
  const auto spec = s.spec("staged", R"({"kind":"diagonal","dim":3,"horizon":60,"curves":[["const",1],["piecewise",[[1,1],[11,0.9]]],["const",0.5]]})");
  REQUIRE(run({"gap", "--spec", spec, "--grid", "0.3,0.05", "--out", s.out("o")}) == kExitPass);
  const auto cert = s.json("o", "certificate.json");
  for (const auto& step : cert["rank_trajectory"]) {
    const double d = step["delta_k"].get<double>();
    CHECK((d == 0.3 || d == 0.05));
  }
  CHECK(run({"gap", "--spec", spec, "--grid", "0.05,0.3", "--out", s.out("o")}) == kExitUsage);
}

TEST_CASE("cli gap: no certificate") {
  Scratch s("gap_fail");
  const auto spec = s.spec("near", R"({"kind":"near_one_accumulating","dim":16,"horizon":30})");
  REQUIRE(run({"gap", "--spec", spec, "--out", s.out("o")}) == kExitNoCertificate);
  const auto failure = s.json("o", "gap_failure.json");
  CHECK(failure["per_n"].size() == 30);
  CHECK_FALSE(fs::exists(fs::path(s.out("o")) / "certificate.json"));
}

TEST_CASE("cli nonexample") {
  Scratch s("nonex");
  REQUIRE(run({"nonexample", "--nmax", "10", "--epsilon", "0.5", "--out", s.out("o")}) == kExitPass);
  const auto summary = s.json("o", "nonexample_summary.json");
  CHECK(summary["net_growth"]["final_net_size"].get<int>() >= 10);
  CHECK(summary["givens"]["ok"] == true);

  REQUIRE(run({"nonexample", "--nmax", "2", "--out", s.out("m")}) == kExitPass);
  const auto minimal = s.json("m", "nonexample_summary.json");
  CHECK(minimal["size"] == 3);
  CHECK(minimal["givens_steps"] == 2);

  CHECK(run({"nonexample", "--nmax", "1", "--out", s.out("x")}) == kExitUsage);
  CHECK(run({"nonexample", "--epsilon", "-1", "--out", s.out("x")}) == kExitUsage);
}

TEST_CASE("cli verify") {
  Scratch s("verify");
  REQUIRE(run({"verify", "--seeds", "3", "--dims", "2,4", "--out", s.out("o")}) == kExitPass);
  const auto report = s.json("o", "verify.json");
  CHECK(report["passed"] == true);
  for (const auto& p : report["properties"]) CHECK(p["cases"].get<int>() > 0);

  CHECK(run({"verify", "--seeds", "0", "--out", s.out("z")}) == kExitUsage);

  REQUIRE(run({"verify", "--seeds", "2", "--dims", "2", "--inject-fault", "--out", s.out("f")}) ==
          kExitVerdictFailure);
  bool invariant_failed = false;
  const auto faulty = s.json("f", "verify.json");
  for (const auto& p : faulty["properties"]) {
    if (p["name"] == "chain_invariants") invariant_failed = p["failures"].get<int>() > 0;
  }
  CHECK(invariant_failed);
}

TEST_CASE("cli outputs are byte-stable") {
  Scratch s("stable");
  const auto spec = s.spec("schur", R"({"kind":"schur_decrement","dim":3,"horizon":40,"seed":9})");
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run({"simulate", "--spec", spec, "--out", s.out(sub)}) != kExitUsage);
    REQUIRE(run({"gap", "--spec", spec, "--out", s.out(sub)}) != kExitUsage);
  }
  for (const char* file : {"trace.csv", "summary.json"}) {
    CHECK(read_text_file(fs::path(s.out("a")) / file) == read_text_file(fs::path(s.out("b")) / file));
  }
}
