// das_sim: command-line driver for data-aided sensing experiments.
//
//   das_sim run      --config scenario.cfg --out results/ [--check]
//   das_sim sweep    --config scenario.cfg --param p --values 0.1,0.2,0.3 [--check]
//   das_sim bandit   --config scenario.cfg --out results/ [--check]
//   das_sim validate [--only 1,4,9]

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "das/csv.hpp"
#include "das/error.hpp"
#include "das/kernels.hpp"
#include "das/scenario.hpp"
#include "das/simulation.hpp"
#include "das/validation.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<das::Index> runs;
  std::string out = ".";
  bool check = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Scenario file (key = value lines)");
  cmd->add_option("--seed", f.seed, "Override the scenario seed");
  cmd->add_option("--runs", f.runs, "Override the Monte-Carlo run count");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--check", f.check, "Exit nonzero if the tolerance checks fail");
}

das::Scenario load(const CommonFlags& f, das::Index default_rounds, das::Index default_runs) {
  das::Scenario s = f.config.empty() ? das::Scenario{} : das::load_scenario(f.config);
  if (!s.explicit_keys.contains("max_rounds")) s.max_rounds = default_rounds;
  if (!s.explicit_keys.contains("runs")) s.runs = default_runs;
  if (f.seed) s.seed = *f.seed;
  if (f.runs) s.runs = *f.runs;
  return s;
}

void write_file(const fs::path& dir, const std::string& name, const auto& writer) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw das::Error("cannot write " + (dir / name).string());
  writer(out);
}

int report(const das::validation::CheckResult& c, bool enforce) {
  std::cout << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << " :: " << c.detail
            << '\n';
  return enforce && !c.passed ? 1 : 0;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-aided sensing simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, sweep_flags, bandit_flags;
  auto* run_cmd = app.add_subcommand("run", "Polling or multichannel ALOHA round curves");
  add_common(run_cmd, run_flags);

  auto* sweep_cmd = app.add_subcommand("sweep", "Final MSE of both access schemes over p or N");
  add_common(sweep_cmd, sweep_flags);
  std::string sweep_param = "p";
  std::string sweep_values = "0.1,0.2,0.3,0.4,0.5,0.6";
  sweep_cmd->add_option("--param", sweep_param, "Swept parameter")
      ->check(CLI::IsMember({"p", "N"}))
      ->capture_default_str();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")->capture_default_str();

  auto* bandit_cmd = app.add_subcommand("bandit", "Softmax model selection over the model family");
  add_common(bandit_cmd, bandit_flags);

  auto* validate_cmd = app.add_subcommand("validate", "Run the acceptance checks");
  std::uint64_t validate_seed = das::validation::Options{}.seed;
  std::vector<std::string> only;
  validate_cmd->add_option("--seed", validate_seed, "Seed for the checks")->capture_default_str();
  validate_cmd->add_option("--only", only, "Check ids to run (e.g. 1,5a,9)")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      das::Scenario s = load(run_flags, 120, 100);
      if (s.mode == das::Mode::bandit) throw das::ValidationError("use the bandit subcommand for mode = bandit");
      const auto result = das::run_scenario(s);
      const fs::path dir(run_flags.out);
      write_file(dir, "run_" + das::to_string(s.mode) + ".csv",
                 [&](std::ostream& o) { das::csv::write_records(o, result); });
      write_file(dir, "summary.csv", [&](std::ostream& o) { das::csv::write_summary(o, result); });
      write_file(dir, "stop_rounds.csv",
                 [&](std::ostream& o) { das::csv::write_stop_rounds(o, result); });
      std::cout << "mean stop round " << das::csv::format_real(result.mean_stop_round) << " ("
                << result.runs_reached_target << "/" << result.runs.size()
                << " runs reached the target); kernels: "
                << das::kernels::to_string(das::kernels::active().isa) << '\n';
      return run_flags.check ? report(das::validation::check_run_result(result), true) : 0;
    }
    if (*sweep_cmd) {
      das::Scenario s = load(sweep_flags, 75, 100);
      const auto param = sweep_param == "p" ? das::SweepParam::p : das::SweepParam::N;
      const auto rows = das::sweep(s, param, parse_values(sweep_values));
      write_file(fs::path(sweep_flags.out), "summary.csv",
                 [&](std::ostream& o) { das::csv::write_sweep(o, rows); });
      das::csv::write_sweep(std::cout, rows);
      return sweep_flags.check ? report(das::validation::check_sweep_result(rows), true) : 0;
    }
    if (*bandit_cmd) {
      das::Scenario s = load(bandit_flags, 120, 200);
      s.mode = das::Mode::bandit;
      const auto result = das::run_bandit_scenario(s);
      das::Scenario base = s;
      base.mode = das::Mode::aloha;
      if (s.bandit_access == das::AccessMode::polling) base.mode = das::Mode::polling;
      const auto baseline = das::run_mismatch_baseline(base);
      const fs::path dir(bandit_flags.out);
      write_file(dir, "bandit.csv", [&](std::ostream& o) { das::csv::write_records(o, result); });
      write_file(dir, "summary.csv", [&](std::ostream& o) { das::csv::write_summary(o, result); });
      write_file(dir, "baseline.csv", [&](std::ostream& o) { das::csv::write_records(o, baseline); });
      write_file(dir, "baseline_summary.csv",
                 [&](std::ostream& o) { das::csv::write_summary(o, baseline); });
      int rc = 0;
      if (bandit_flags.check) {
        rc |= report(das::validation::check_bandit_result(result), true);
        rc |= report(das::validation::check_baseline_result(baseline), true);
      }
      return rc;
    }
    if (*validate_cmd) {
      das::validation::Options opt;
      opt.seed = validate_seed;
      std::cout << "kernels: " << das::kernels::to_string(das::kernels::active().isa) << '\n';
      const auto results = das::validation::run_acceptance(opt, &std::cout, only);
      int failed = 0;
      for (const auto& r : results) failed += r.passed ? 0 : 1;
      std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
                << " checks passed\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const das::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
