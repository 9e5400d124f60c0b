#pragma once

// Self-validation harness: the acceptance checks behind `das_sim validate`
// and the acceptance test binary, plus the tolerance checks applied by the
// experiment commands when run with --check.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "das/simulation.hpp"

namespace das::validation {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20200501;
  Index threads = 0;
};

CheckResult check_round_counts(const Options& opt);         // 1
CheckResult check_throughput(const Options& opt);           // 2
CheckResult check_crossover(const Options& opt);            // 3
CheckResult check_conditioning_oracle(const Options& opt);  // 4
CheckResult check_greedy_single(const Options& opt);        // 5, Q = 1
CheckResult check_greedy_pair(const Options& opt);          // 5, Q = 2
CheckResult check_mse_calibration(const Options& opt);      // 6
CheckResult check_predetermined_order(const Options& opt);  // 7
CheckResult check_bandit_greedy_temperature(const Options& opt);  // 8, tau = 1
CheckResult check_bandit_hot_temperature(const Options& opt);     // 8, tau = 20
CheckResult check_true_model_cost(const Options& opt);            // 8, E[Y] = 1
CheckResult check_softmax(const Options& opt);                    // 9

struct NamedCheck {
  std::string id;
  std::function<CheckResult(const Options&)> run;
};

std::vector<NamedCheck> acceptance_checks();

// Runs every acceptance check (or those whose id is listed in `only`),
// printing one PASS/FAIL line each to `log` when non-null.
std::vector<CheckResult> run_acceptance(const Options& opt, std::ostream* log,
                                        const std::vector<std::string>& only = {});

// Tolerance checks on finished experiments.
CheckResult check_run_result(const ScenarioResult& r);
CheckResult check_sweep_result(const std::vector<SweepRow>& rows);
CheckResult check_bandit_result(const ScenarioResult& r);
CheckResult check_baseline_result(const ScenarioResult& r);

// Helpers shared with the tests.

// Brute-force Tr(Cov(u_rest | z, x[extra])) from batch conditioning.
double conditional_mse_after(const GaussianModel& model, const std::vector<Index>& known,
                             const std::vector<Index>& extra);

// Random symmetric positive-definite K x K covariance.
Matrix random_covariance(Index K, Rng& rng);

}  // namespace das::validation
