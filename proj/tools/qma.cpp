#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qma/errors.hpp"
#include "qma/estimates.hpp"
#include "qma/exec.hpp"
#include "qma/problem_config.hpp"
#include "qma/qmaf.hpp"
#include "qma/solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kPositivityLost = 3;
constexpr int kNoConvergence = 4;

int status_code(qma::SolveStatus s) {
  switch (s) {
    case qma::SolveStatus::converged: return kOk;
    case qma::SolveStatus::positivity_lost: return kPositivityLost;
    case qma::SolveStatus::no_convergence:
    case qma::SolveStatus::stalled: return kNoConvergence;
  }
  return kNoConvergence;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

int run_solve(const fs::path& config, const fs::path& out, const fs::path& log) {
  qma::RunConfig rc;
  try {
    rc = qma::load_config(config);
  } catch (const qma::Error& e) {
    std::cerr << "qma solve: " << e.what() << "\n";
    return kConfigError;
  }
  const qma::SolveResult res = qma::continuity_solve(rc.problem, rc.solver);
  try {
    std::ofstream csv(log, std::ios::binary | std::ios::trunc);
    if (!csv) throw qma::FormatError("cannot write " + log.string());
    res.report.write_csv(csv);
    qma::qmaf::write(out, res.state.phi);
    qma::qmaf::write(with_suffix(out, "_U.qmaf"), qma::current_U(res.state, rc.problem));

    nlohmann::ordered_json j;
    j["status"] = qma::to_string(res.report.status);
    j["A"] = res.state.A;
    j["t"] = res.state.t;
    j["residual_linf"] = res.report.stages.empty() ? 0.0 : res.report.stages.back().residual_linf;
    j["pogorelov_sup_max"] = res.report.stages.empty() ? 0.0 : res.report.pogorelov_max();
    j["stages"] = res.report.stages.size();
    if (!res.report.message.empty()) j["message"] = res.report.message;
    std::ofstream js(with_suffix(out, ".json"), std::ios::binary | std::ios::trunc);
    js << j.dump(2) << "\n";
    if (!js) throw qma::FormatError("cannot write final-state JSON");
  } catch (const qma::Error& e) {
    std::cerr << "qma solve: " << e.what() << "\n";
    return kConfigError;
  }
  if (!res.report.ok()) std::cerr << "qma solve: " << res.report.message << "\n";
  return status_code(res.report.status);
}

int run_check(const std::string& suite, std::uint64_t seed, int trials, const std::string& csv_path,
              const std::string& json_path) {
  qma::SuiteResult all;
  auto add = [&](const qma::SuiteResult& r) {
    all.reports.insert(all.reports.end(), r.reports.begin(), r.reports.end());
  };
  if (trials > 0) {
    if (suite == "algebra" || suite == "all") add(qma::run_algebra_suite(seed, trials));
    if (suite == "calculus" || suite == "all") add(qma::run_calculus_suite(seed, trials));
    if (suite == "estimates" || suite == "all") add(qma::run_estimates_suite(seed, trials));
  }
  if (csv_path.empty()) {
    all.write_csv(std::cout);
  } else {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    all.write_csv(out);
  }
  const std::string summary = all.summary_json();
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
    out << summary << "\n";
  } else {
    std::cerr << summary << "\n";
  }
  return all.pass() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternionic Monge-Ampere solver and verifiers on flat tori"};
  app.require_subcommand(1);
  bool deterministic = false;
  app.add_flag("--deterministic", deterministic, "Force sequential reductions");

  auto* solve = app.add_subcommand("solve", "Solve a problem described by a JSON config");
  std::string config_path, out_path, log_path;
  solve->add_option("--config", config_path, "Problem config (JSON)")->required();
  solve->add_option("--out", out_path, "Output phi (QMAF)")->required();
  solve->add_option("--log", log_path, "Iteration log (CSV)")->required();

  auto* check = app.add_subcommand("check", "Run property and inequality suites");
  std::string suite = "all";
  std::uint64_t seed = 42;
  int trials = 100;
  std::string csv_out, json_out;
  bool nondeterministic = false;
  check->add_option("suite", suite, "algebra | calculus | estimates | all")
      ->check(CLI::IsMember({"algebra", "calculus", "estimates", "all"}));
  check->add_option("--seed", seed, "RNG seed");
  check->add_option("--trials", trials, "Random samples per check")->check(CLI::NonNegativeNumber);
  check->add_option("--csv", csv_out, "Write the CSV report here instead of stdout");
  check->add_option("--json", json_out, "Write the JSON summary here");
  check->add_flag("--parallel-reductions", nondeterministic, "Allow parallel reductions");

  auto* make = app.add_subcommand("make", "Write a standard test problem");
  std::string kind;
  std::uint64_t make_seed = 0;
  std::string make_out;
  make->add_option("kind", kind, "poisson1 | manufactured2 | slice2d | random")
      ->required()
      ->check(CLI::IsMember({"poisson1", "manufactured2", "slice2d", "random"}));
  make->add_option("--seed", make_seed, "RNG seed");
  make->add_option("--out", make_out, "Output directory")->required();

  auto* info = app.add_subcommand("info", "Print the header of a QMAF file");
  std::string info_path;
  info->add_option("file", info_path, "QMAF file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  qma::exec::set_deterministic(deterministic);
  try {
    if (*solve) return run_solve(config_path, out_path, log_path);
    if (*check) {
      qma::exec::set_deterministic(!nondeterministic || deterministic);
      return run_check(suite, seed, trials, csv_out, json_out);
    }
    if (*make) {
      const fs::path cfg = qma::make_problem_files(kind, make_seed, make_out);
      std::cout << cfg.string() << "\n";
      return kOk;
    }
    if (*info) {
      std::cout << qma::qmaf::read_header(info_path) << "\n";
      return kOk;
    }
  } catch (const qma::Error& e) {
    std::cerr << "qma: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
