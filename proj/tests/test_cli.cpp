#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fkpp/cli.hpp"
#include "fkpp/config.hpp"
#include "json.hpp"

using namespace fkpp;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::Io;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fkpp_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_with(const std::string& sub, const std::string& config, const fs::path& dir,
             std::string* err_text = nullptr) {
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << config;
  cli::RunOptions o;
  o.config_path = cfg;
  o.out_dir = dir / "out";
  o.quiet = true;
  std::ostringstream out, err;
  const int rc = cli::run(sub, o, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("config grammar") {
  const auto c = parse_config("[model]\np = 3\nq = 1\nA = 1\nB = 1\nK = 1");
  CHECK(c.model().p == 3.0);
  CHECK(c.model().normalized());

  const auto d = parse_config(
      "# leading comment\n[model]\n  p=2.5e0   # trailing\nq = .5\n\n[grid]\nL = 1E1\nn = 11\n"
      "[experiment]\nsubsolution = false\n");
  CHECK(d.number("model", "p") == 2.5);
  CHECK(d.number("model", "q") == 0.5);
  CHECK(d.grid().half_width() == 10.0);
  CHECK_FALSE(d.flag_or("experiment", "subsolution", true));

  try {
    parse_config("[model]\np = 3\nq = banana\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.code() == ErrorCode::ParseError);
  }
  CHECK(code_of([] { parse_config("p = banana"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[model]\np = 1..2\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[model]\np = nan\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[model]\np = 3\np = 4\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[model\np = 3\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_config("[model]\nr = 3\n"); }) == ErrorCode::UnknownKey);
  CHECK(code_of([] { parse_config("[output]\n"); }) == ErrorCode::UnknownKey);

  const auto m = parse_config("[grid]\nL = 10\n");
  CHECK(code_of([&] { m.grid(); }) == ErrorCode::MissingKey);
  const auto frac = parse_config("[grid]\nL = 10\nn = 10.5\n");
  CHECK(code_of([&] { frac.grid(); }) == ErrorCode::InvalidConfig);
  const auto solver = parse_config("[solver]\nsigma = 2\n");
  CHECK(code_of([&] { solver.solver(); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.17677669529663687}) {
    CHECK(std::strtod(cli::format_number(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("rescale subcommand") {
  const auto r = cli::execute("rescale", parse_config("[model]\np = 3\nq = 2\nA = 2\nB = 8\nK = 1\n"));
  REQUIRE(r.files.size() == 1);
  const auto j = nlohmann::json::parse(r.files[0].content);
  CHECK(j["a"].get<double>() == doctest::Approx(0.1767767).epsilon(1e-7));
  CHECK(j["b"].get<double>() == 0.03125);
  CHECK(j["c"].get<double>() == 4.0);
  CHECK(r.files[0].content.find("\"a\"") < r.files[0].content.find("\"b\""));
}

TEST_CASE("classify reports the variant and the fits") {
  const auto r = cli::execute(
      "classify",
      parse_config("[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 1001\n[experiment]\nkappa = 1.1\n"));
  const auto j = nlohmann::json::parse(r.files.at(0).content);
  CHECK(j["variant"] == "BlowUp");
  CHECK(j["predicted"] == "BlowUp");
  CHECK(j["blowup_fit"].is_object());
}

TEST_CASE("CSV headers") {
  const auto st = cli::execute(
      "stationary", parse_config("[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 301\n"));
  CHECK(st.files.at(0).content.rfind("x,value,derivative\n", 0) == 0);
  const auto ode = cli::execute(
      "time-ode", parse_config("[model]\np = 3\nq = 2\n[experiment]\nh0 = 0.5\nt_end = 5\n"));
  CHECK(ode.files.at(0).content.rfind("t,h\n", 0) == 0);
  const auto vc = cli::execute(
      "verify-candidate",
      parse_config("[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 301\n[experiment]\nkappa = 1.21\n"
                   "lattice_nx = 5\nlattice_nt = 3\n"));
  CHECK(vc.files.at(0).content.rfind("x,t,residual\n", 0) == 0);
  CHECK(vc.status == cli::kExitOk);
  const auto gap = cli::execute(
      "gap", parse_config("[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 301\n[solver]\nt_max = 3\n"));
  CHECK(gap.files.at(0).content.rfind("t,gap_initial_mass,gap_measured_mass\n", 0) == 0);
  const auto ev = cli::execute(
      "evolve", parse_config("[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 301\n[solver]\nt_max = 2\n"
                             "[experiment]\nkappa = 0.5\n"));
  CHECK(ev.files.at(0).content.rfind("t,sup_norm,mass,energy\n", 0) == 0);
  CHECK(ev.files.at(1).name == "snapshot_0000.csv");
}

TEST_CASE("exit statuses and atomic output") {
  TempDir tmp;
  std::string err;
  CHECK(run_with("rescale", "[model]\np = 3\nq = 2\nA = 2\nB = 8\n", tmp.path) == cli::kExitOk);
  CHECK(fs::exists(tmp.path / "out" / "coefficients.json"));
  CHECK(fs::exists(tmp.path / "out" / "meta.json"));

  TempDir bad;
  const int rc = run_with("bisect",
                          "[model]\np = 3\nq = 1\n[grid]\nL = 30\nn = 601\n[solver]\n"
                          "decay_threshold = 0.5\n[experiment]\nkappa_lo = 1.5\nkappa_hi = 2\n"
                          "iters = 3\n",
                          bad.path, &err);
  CHECK(rc == cli::kExitError);
  CHECK(err.find("BadBracket") != std::string::npos);
  CHECK_FALSE(fs::exists(bad.path / "out"));

  TempDir parse;
  CHECK(run_with("rescale", "[model]\np = banana\n", parse.path, &err) == cli::kExitError);
  CHECK(err.find("ParseError") != std::string::npos);

  // Asymptotics fail at a very tight tolerance: exit 2, files still written.
  TempDir strict;
  CHECK(run_with("stationary",
                 "[model]\np = 3\nq = 2\n[grid]\nL = 60\nn = 1201\n[experiment]\ntolerance = 1e-6\n",
                 strict.path) == cli::kExitFailedCheck);
  CHECK(fs::exists(strict.path / "out" / "asymptotics.json"));

  TempDir gen;
  CHECK(run_with("evolve", "[model]\np = 3\nq = 2\nA = 2\n[grid]\nL = 5\nn = 11\n", gen.path) ==
        cli::kExitError);
}

TEST_CASE("commit leaves no temporaries") {
  TempDir tmp;
  cli::commit_files(tmp.path, {{"a.csv", "x\n1\n"}, {"b.json", "{}\n"}});
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(tmp.path)) {
    ++n;
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
  CHECK(n == 2);
}
