#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlat/dynamics.hpp"
#include "hlat/kernels.hpp"
#include "hlat/lattice.hpp"

using nlohmann::json;
using namespace hlat;

namespace {

std::string cli_path() {
  if (const char* env = std::getenv("HLAT_CLI_PATH")) return env;
  for (const char* guess : {"./hlat", "build/hlat", "./build/hlat"}) {
    std::ifstream probe(guess);
    if (probe.good()) return guess;
  }
  return "./hlat";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with the given arguments (and optional extra environment
// prefix), capturing the two streams separately.
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd = env_prefix + cli_path() + " " + args + " >" + out_path +
                          " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("kernel command emits the zero-time identity table") {
  const RunResult r = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 0 --radius 2");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 16);  // header + 3 kernels x 5 sites
  const std::vector<std::string> header{"d",     "omega", "lambdas",    "m",
                                        "t",     "x",     "value",      "resolution",
                                        "est_error"};
  CHECK(rows[0] == header);
  int delta_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 9);
    CHECK(rows[i][0] == "1");
    CHECK(rows[i][4] == "0");
    const double value = std::stod(rows[i][6]);
    if (rows[i][3] == "0" && rows[i][5] == "0") {
      CHECK(std::abs(value - 1.0) < 1e-12);
      ++delta_rows;
    } else {
      CHECK(std::abs(value) < 1e-12);
    }
  }
  CHECK(delta_rows == 1);
}

TEST_CASE("kernel rows round-trip against a direct library call") {
  const RunResult r = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 5 --radius 20");
  REQUIRE(r.exit_code == 0);
  QuadratureSpec spec;
  const KernelTable table = kernel_table(ModelParams{1, 1.0, {1.0}}, 5.0, 20, spec);

  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1 + 3 * 41);
  // Rows are ordered m in {-1, 0, 1} outer, then x ascending.
  std::size_t i = 1;
  for (int m = -1; m <= 1; ++m) {
    for (int x = -20; x <= 20; ++x, ++i) {
      CHECK(rows[i][3] == std::to_string(m));
      CHECK(rows[i][5] == std::to_string(x));
      CHECK(std::stod(rows[i][6]) == table.value(KernelIndex(m), {x}));
      CHECK(std::stoi(rows[i][7]) == table.resolution);
      CHECK(std::stod(rows[i][8]) == table.est_error);
    }
  }
}

TEST_CASE("csv and json outputs carry equal values") {
  const std::string args = "kernel --d 2 --omega 1 --lambda 1 --lambda 0.5 --t 2 --radius 3";
  const RunResult csv = run_cli(args + " --format csv");
  const RunResult js = run_cli(args + " --format json");
  REQUIRE(csv.exit_code == 0);
  REQUIRE(js.exit_code == 0);

  const auto rows = parse_csv(csv.out);
  const json doc = json::parse(js.out);
  CHECK(doc.contains("config"));
  CHECK(doc.contains("results"));
  CHECK(doc.contains("checks"));
  CHECK(doc["version"] == "1.0.0");
  CHECK(doc["config"]["model"]["dimension"] == 2);

  const auto& results = doc["results"];
  REQUIRE(results.size() == rows.size() - 1);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& row = rows[i + 1];
    const auto& obj = results[i];
    CHECK(obj["m"].get<int>() == std::stoi(row[3]));
    CHECK(obj["x"].get<std::string>() == row[5]);
    CHECK(obj["value"].get<double>() == std::stod(row[6]));
    CHECK(obj["est_error"].get<double>() == std::stod(row[8]));
  }
  // Two-dimensional sites use semicolon-joined coordinates.
  CHECK(rows[1][5] == "-3;-3");
  CHECK(rows[1][2] == "1;0.5");
}

TEST_CASE("identical invocations produce byte-identical output") {
  const std::string args = "kernel --d 1 --omega 1 --lambda 1 --t 3.5 --radius 8 --format json";
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);

  const RunResult c = run_cli("commutator --d 1 --omega 1 --lambda 1 --f 0:1 --g 5:1 --t 3");
  const RunResult d = run_cli("commutator --d 1 --omega 1 --lambda 1 --f 0:1 --g 5:1 --t 3");
  REQUIRE(c.exit_code == 0);
  CHECK(c.out == d.out);
}

TEST_CASE("commutator command reports norm, bound, and phase") {
  const RunResult zero = run_cli("commutator --d 1 --omega 1 --lambda 1 --f 0:1 --g 3:1 --t 0");
  REQUIRE(zero.exit_code == 0);
  const auto zrows = parse_csv(zero.out);
  REQUIRE(zrows.size() == 2);
  const std::vector<std::string> header{"d", "omega", "lambdas", "t",
                                        "norm", "bound", "phase"};
  CHECK(zrows[0] == header);
  CHECK(std::stod(zrows[1][4]) == 0.0);  // disjoint supports at t = 0

  const RunResult r = run_cli(
      "commutator --d 1 --omega 1 --lambda 1 --f 0:1 --g 5:1 --t 3 --t 7");
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);

  QuadratureSpec spec;
  const ModelParams chain{1, 1.0, {1.0}};
  const LatticeFunction f = LatticeFunction::delta(1, {0});
  const LatticeFunction g = LatticeFunction::delta(1, {5});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i][3]);
    const double norm = std::stod(rows[i][4]);
    const double bound = std::stod(rows[i][5]);
    const double phase = std::stod(rows[i][6]);
    CHECK(norm == doctest::Approx(commutator_norm(chain, f, g, t, spec)).epsilon(1e-12));
    CHECK(bound == doctest::Approx(commutator_bound(chain, f, g, t, spec)).epsilon(1e-12));
    CHECK(norm <= bound + 1e-12);
    CHECK(norm == doctest::Approx(2.0 * std::abs(std::sin(0.5 * phase))).epsilon(1e-12));
  }

  // Complex amplitudes parse in the re+imi literal form.
  const RunResult cplx = run_cli(
      "commutator --d 1 --omega 1 --lambda 1 --f 0:0.5-1.25i,2:1 --g 1:0.25i --t 2");
  REQUIRE(cplx.exit_code == 0);
  LatticeFunction fc(1), gc(1);
  fc.set({0}, {0.5, -1.25});
  fc.set({2}, 1.0);
  gc.set({1}, {0.0, 0.25});
  const double expect = commutator_norm(chain, fc, gc, 2.0, spec);
  CHECK(std::stod(parse_csv(cplx.out)[1][4]) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("verification protocols pass on the reference models") {
  const RunResult d1 = run_cli("verify thm-2.2 --format json");
  REQUIRE(d1.exit_code == 0);
  const json doc1 = json::parse(d1.out);
  bool found_slope = false;
  for (const auto& check : doc1["checks"]) {
    CHECK(check["pass"].get<bool>());
    if (check["name"] == "rescaled-slope-bounded") {
      found_slope = true;
      CHECK(check["value"].get<double>() <= 0.05);
      CHECK(check["threshold"].get<double>() == 0.05);
    }
  }
  CHECK(found_slope);

  const RunResult d2 = run_cli("verify thm-2.1 --format json");
  REQUIRE(d2.exit_code == 0);
  const json doc2 = json::parse(d2.out);
  CHECK(doc2["config"]["model"]["dimension"] == 2);
  for (const auto& check : doc2["checks"]) CHECK(check["pass"].get<bool>());

  const RunResult fx = run_cli("verify thm-2.3 --d 1 --format json");
  REQUIRE(fx.exit_code == 0);
  const json doc3 = json::parse(fx.out);
  double exponent = 0.0;
  for (const auto& row : doc3["results"]) {
    if (row["key"] == "exponent") exponent = row["value"].get<double>();
  }
  CHECK(exponent > -0.6);
  CHECK(exponent < -0.4);
  for (const auto& check : doc3["checks"]) CHECK(check["pass"].get<bool>());
}

TEST_CASE("figure scan emits a region table with a silent zero-time column") {
  const RunResult r = run_cli("verify figure-1 --format json");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  bool saw_zero_time = false;
  for (const auto& row : doc["results"]) {
    const double value = row["value"].get<double>();
    CHECK(value >= 0.0);
    CHECK(value <= 2.0);
    const std::string region = row["key"].get<std::string>();
    CHECK((region == "exponentially-small" || region == "power-law" ||
           region == "order-one"));
    if (row["t"].get<double>() == 0.0) {
      saw_zero_time = true;
      CHECK(value == 0.0);
      CHECK(region == "exponentially-small");
    }
  }
  CHECK(saw_zero_time);
  for (const auto& check : doc["checks"]) CHECK(check["pass"].get<bool>());

  // CSV mode carries the same cells: row_type,key,t,x,value,threshold,pass.
  const RunResult csv = run_cli("verify figure-1");
  REQUIRE(csv.exit_code == 0);
  const auto rows = parse_csv(csv.out);
  CHECK(rows[0] == std::vector<std::string>{"row_type", "key", "t", "x", "value",
                                            "threshold", "pass"});
  std::size_t result_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] == "result") ++result_rows;
  }
  CHECK(result_rows == doc["results"].size());
}

TEST_CASE("selftest passes fresh and fails with a corrupted tolerance") {
  const RunResult ok = run_cli("selftest");
  REQUIRE(ok.exit_code == 0);
  const auto rows = parse_csv(ok.out);
  REQUIRE(rows.size() > 5);
  CHECK(rows[0] == std::vector<std::string>{"name", "status", "detail"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][1] == "ok");
  }

  const RunResult bad = run_cli("selftest --tolerance 1e-99");
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("NoConvergence") != std::string::npos);
  bool any_fail = false, any_ok = false;
  for (const auto& row : parse_csv(bad.out)) {
    if (row[1] == "fail") any_fail = true;
    if (row[1] == "ok") any_ok = true;
  }
  CHECK(any_fail);
  CHECK(any_ok);  // closed-form checks do not touch the quadrature
}

TEST_CASE("usage errors exit with code two and keep stdout clean") {
  for (const std::string& args : {
           std::string("explode"),                                        // unknown command
           std::string("kernel --d 1 --omega 1 --lambda 1 --t zzz --radius 2"),  // bad number
           std::string("kernel --d 0 --omega 1 --lambda 1 --t 1 --radius 2"),    // bad model
           std::string("kernel --d 1 --omega 1 --lambda 1 --lambda 2 --t 1 --radius 2"),
           std::string("commutator --d 1 --omega 1 --lambda 1 --f 0:bogus --g 1:1 --t 1"),
           std::string("verify thm-9.9"),
           std::string("verify thm-2.1 --d 5"),  // scan dimension guard
           std::string("kernel --d 1 --omega 1 --lambda 1 --t 1 --radius 2 --format xml"),
       }) {
    const RunResult r = run_cli(args);
    CHECK(r.exit_code == 2);
    CHECK(r.out.empty());
    CHECK(!r.err.empty());
  }

  // The backend override rejects unknown names through the same path.
  const RunResult env = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 1 --radius 2",
                                "HLAT_BACKEND=bogus ");
  CHECK(env.exit_code == 2);
  CHECK(env.out.empty());
  CHECK(!env.err.empty());

  const RunResult scalar = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 1 --radius 2",
                                   "HLAT_BACKEND=scalar ");
  CHECK(scalar.exit_code == 0);
}

TEST_CASE("computational failures exit with code one") {
  // An unreachable tolerance cannot converge: exit 1, diagnostics on stderr.
  const RunResult r = run_cli(
      "kernel --d 1 --omega 1 --lambda 1 --t 1 --radius 2 --tolerance 1e-99");
  CHECK(r.exit_code == 1);
  CHECK(!r.err.empty());
  CHECK(r.err.find("NoConvergence") != std::string::npos);
}

TEST_CASE("config files supply defaults and flags override them") {
  const std::string path = "cli_config.tmp";
  {
    std::ofstream cfg(path);
    cfg << "d=1\nomega=1.0\nlambda=1.0\nt=5.0\nradius=3\n";
  }
  const RunResult from_file = run_cli("kernel --config " + path);
  REQUIRE(from_file.exit_code == 0);
  const RunResult from_flags = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 5 --radius 3");
  REQUIRE(from_flags.exit_code == 0);
  CHECK(from_file.out == from_flags.out);

  // A flag beats the file: radius shrinks to 1 (3 sites per kernel).
  const RunResult overridden = run_cli("kernel --config " + path + " --radius 1");
  REQUIRE(overridden.exit_code == 0);
  CHECK(parse_csv(overridden.out).size() == 1 + 3 * 3);
  std::remove(path.c_str());
}

TEST_CASE("output lands in the requested file instead of stdout") {
  const std::string path = "cli_out.tmp";
  const RunResult r = run_cli("kernel --d 1 --omega 1 --lambda 1 --t 0 --radius 1 --output " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  const std::string written = slurp(path);
  CHECK(written.find("d,omega,lambdas") == 0);
  CHECK(parse_csv(written).size() == 10);
  std::remove(path.c_str());
}
