#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cm/cli.hpp"
#include "cm/errors.hpp"
#include "cm/problem.hpp"

using namespace cm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the cm binary; stderr is discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string(CM_BINARY) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string problem(const std::string& name) { return std::string(CM_PROBLEMS) + "/" + name + ".json"; }

// Per-process scratch directory, removed at exit.
struct Scratch {
  fs::path dir = fs::temp_directory_path() / ("cm_cli_test_" + std::to_string(::getpid()));
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

fs::path scratch() {
  static const Scratch s;
  fs::create_directories(s.dir);
  return s.dir;
}

std::string write_problem(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

json simple_problem() { return json::parse(read_file(problem("transcritical_scalar"))); }

}  // namespace

TEST_CASE("spectrum of the transcritical problem") {
  const auto r = run("spectrum " + problem("transcritical_scalar"));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["spectrum"]["M"] == 1);
  REQUIRE(j["spectrum"]["roots"].size() == 1);
  CHECK(std::abs(complex_from_json(j["spectrum"]["roots"][0]["nu"])) < 1e-12);
}

TEST_CASE("spectrum of the mode-interaction problem") {
  const auto r = run("spectrum " + problem("mode_interaction"));
  REQUIRE(r.code == 0);
  const auto roots = json::parse(r.out)["spectrum"]["roots"];
  REQUIRE(roots.size() == 2);
  for (const auto& root : roots) {
    CHECK(root["algebraic_multiplicity"] == 2);
    CHECK(std::abs(std::abs(complex_from_json(root["nu"]).imag()) - 1.0) < 1e-10);
  }
}

TEST_CASE("reduce output is byte-stable and round-trips") {
  const auto a = run("reduce " + problem("mode_interaction"));
  const auto b = run("reduce " + problem("mode_interaction"));
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(dump_stable(json::parse(a.out)) == a.out);
  const fs::path out = scratch() / "reduce.json";
  REQUIRE(run("reduce " + problem("mode_interaction") + " --out " + out.string()).code == 0);
  CHECK(read_file(out) == a.out);
}

TEST_CASE("reduce field of the transcritical problem") {
  const auto r = run("reduce " + problem("transcritical_scalar") + " --order 3");
  REQUIRE(r.code == 0);
  const auto terms = json::parse(r.out)["field"]["complex"]["terms"];
  REQUIRE(terms.size() == 2);
  const double alpha = -2.0 / std::sqrt(M_PI);
  CHECK(terms[0]["monomial"] == "A^2");
  CHECK(std::abs(complex_from_json(terms[0]["coeff"]) - alpha) < 1e-12);
  CHECK(std::abs(complex_from_json(terms[1]["coeff"]) - 0.5 * alpha * alpha * alpha) < 1e-12);
}

TEST_CASE("input errors exit with 2") {
  CHECK(run("reduce " + problem("transcritical_scalar") + " --order 1").code == 2);
  CHECK(run("spectrum " + write_problem("bad.json", "{\"schema\": 1, \"kernel\": ")).code == 2);
  CHECK(run("spectrum /nonexistent/problem.json").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("spectrum").code == 2);
  CHECK(run("spectrum " + problem("transcritical_scalar") + " --tol-root -1").code == 2);

  auto typo = simple_problem();
  typo["ordr"] = 3;
  CHECK(run("spectrum " + write_problem("typo.json", typo.dump())).code == 2);
  auto version = simple_problem();
  version["schema"] = 2;
  CHECK(run("spectrum " + write_problem("version.json", version.dump())).code == 2);
  auto missing = simple_problem();
  missing["nonlinearity"]["terms"][0]["outer"] = "G";
  CHECK(run("reduce " + write_problem("missing.json", missing.dump())).code == 2);
  auto family = simple_problem();
  family["kernel"]["family"] = "lorentzian";
  CHECK(run("spectrum " + write_problem("family.json", family.dump())).code == 2);
}

TEST_CASE("numerical failures exit with 1") {
  // 1 + K^ never vanishes on the axis: nothing to reduce
  auto none = simple_problem();
  none["kernel"] = json::parse(R"({"family": "gaussian_mixture", "terms": [{"c": 0.5, "a": 1.0}]})");
  const std::string path = write_problem("none.json", none.dump());
  CHECK(run("spectrum " + path).code == 0);
  CHECK(run("reduce " + path).code == 1);
}

TEST_CASE("verify writes reports and CSV") {
  const fs::path dir = scratch() / "csv";
  const auto r = run("verify " + problem("slow_front") + " --csv " + dir.string());
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["ok"] == true);
  REQUIRE(j["runs"].size() == 2);
  for (const auto& run : j["runs"]) {
    CHECK(run["found"] == true);
    CHECK(run["monotone"] == true);
  }
  const std::string csv = read_file(dir / "front_0.csv");
  CHECK(csv.rfind("x,re_u,im_u,residual\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("in-process entry point and help") {
  std::ostringstream out, err;
  std::vector<std::string> args = {"cm", "--help"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data(), out, err) == 0);
  CHECK(out.str().find("spectrum") != std::string::npos);
}

TEST_CASE("kernel families parse") {
  const auto e = kernel_from_json(json::parse(R"({"family": "exponential_mixture", "terms": [{"c": 1, "a": 2, "b": 0.5}]})"));
  CHECK(e.eta0 == 2.0);
  const auto d = kernel_from_json(json::parse(R"({"family": "dirac_mixture", "terms": [{"A": [0, 1], "xi": 0.5}]})"));
  CHECK(kernel_has_dirac(d));
  const auto s = kernel_from_json(json::parse(
      R"({"family": "symbol", "numerator": [1], "denominator": [1, 0, -0.25], "poles_hint": [2],
          "base": {"family": "gaussian_mixture", "terms": [{"c": 1, "a": 1}]}})"));
  CHECK(s.eta0 == doctest::Approx(1.98));
  const cplx nu(0.0, 0.7);
  CHECK(std::abs(transform(s, nu)(0, 0) - std::sqrt(M_PI) * std::exp(nu * nu / 4.0) / (1.0 - 0.25 * nu * nu)) < 1e-13);
  const auto sum = kernel_from_json(json::parse(
      R"({"family": "sum", "parts": [{"family": "gaussian_mixture", "terms": [{"c": 1, "a": 1}]},
                                     {"family": "exponential_mixture", "terms": [{"c": 1, "a": 3}]}]})"));
  CHECK(std::abs(transform(sum, 0.0)(0, 0) - (std::sqrt(M_PI) + 2.0 / 3.0)) < 1e-13);
  const auto m = kernel_from_json(json::parse(
      R"({"family": "scaled", "factor": [[0, 1], [1, 0]],
          "kernel": {"family": "gaussian_mixture", "n": 2, "terms": [{"c": [[1, 0], [0, 2]], "a": 1}]}})"));
  CHECK(m.n == 2);
  CHECK(std::abs(transform(m, 0.0)(0, 1) - 2.0 * std::sqrt(M_PI)) < 1e-13);
  CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family": "gaussian_mixture", "terms": [{"c": 1, "a": -1}]})")),
                  InputError);
  CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"family": "gaussian_mixture", "terms": [{"c": 1, "a": 1, "q": 2}]})")),
                  InputError);
}
