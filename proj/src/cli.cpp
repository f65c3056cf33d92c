#include "cm/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cm/errors.hpp"
#include "cm/problem.hpp"

namespace cm {

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw InputError("cannot write '" + path + "'");
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = dump_stable(j);
  if (out_path.empty()) out << text;
  else write_text(out_path, text);
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cm: center-manifold reduction for nonlocal equations"};
  app.require_subcommand(1);
  std::string problem_path, out_path, csv_dir;
  RunOptions opt;
  int order = 0;
  unsigned seed = 7;

  auto common = [&](CLI::App* sub, bool jet) {
    sub->add_option("problem", problem_path, "problem JSON file")->required();
    sub->add_option("--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--tol-root", opt.tol_root, "root snapping and certification tolerance")->check(CLI::PositiveNumber);
    if (jet) {
      sub->add_option("--order", order, "jet order (>= 2)");
      sub->add_option("--tol-solve", opt.tol_solve, "linear solve residual tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--seed", seed, "seed for randomized symmetry probes");
    }
  };
  CLI::App* spectrum = app.add_subcommand("spectrum", "locate and certify characteristic roots");
  common(spectrum, false);
  CLI::App* reduce = app.add_subcommand("reduce", "compute the center-manifold jet and reduced field");
  common(reduce, true);
  CLI::App* verify = app.add_subcommand("verify", "shoot reduced orbits and check full-equation residuals");
  common(verify, true);
  verify->add_option("--csv", csv_dir, "directory for profile CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "cm: " << e.what() << "\n";
    return 2;
  }
  if (order != 0) opt.order = order;
  opt.seed = seed;

  try {
    const Problem p = load_problem(problem_path);
    if (spectrum->parsed()) {
      emit(spectrum_report(p, run_spectrum(p, opt)), out_path, out);
      return 0;
    }
    const Pipeline pl = run_reduction(p, opt);
    if (reduce->parsed()) {
      emit(reduce_report(p, pl), out_path, out);
      return 0;
    }
    VerifyOutcome v = run_verify(p, pl, opt);
    v.report["ok"] = v.ok;
    emit(v.report, out_path, out);
    if (!csv_dir.empty()) {
      std::filesystem::create_directories(csv_dir);
      for (const auto& [name, text] : v.csv) write_text((std::filesystem::path(csv_dir) / name).string(), text);
    }
    if (!v.ok) {
      err << "cm: verification failed\n";
      return 1;
    }
    return 0;
  } catch (const InputError& e) {
    err << "cm: input error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    err << "cm: input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "cm: numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "cm: input error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cm
