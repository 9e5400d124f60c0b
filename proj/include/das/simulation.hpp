#pragma once

// Monte-Carlo orchestration of data-aided sensing sessions.

#include <string>
#include <vector>

#include "das/scenario.hpp"

namespace das {

struct RoundRecord {
  Index run = 0;
  Index t = 0;
  Index known = 0;            // K_t: measurements held before this round
  Index requested = 0;
  Index delivered = 0;
  Index collided = 0;         // channels carrying a collision
  double expected_delivered = 0.0;  // closed-form throughput for this round's Q
  double mse_theory = 0.0;    // after ingesting this round
  double sqerr_actual = 0.0;

  // Bandit rounds.
  Index model = 0;            // 1-based m(t); 0 outside bandit mode
  double cost = 0.0;          // Y; NaN when nothing was delivered
  double pred_sqerr = 0.0;    // ||x_D - x_hat_D||^2 under m(t)
  double pred_mse = 0.0;      // Tr(Cov_m(x_D | z))
  std::vector<double> probs;  // softmax probabilities after this round (NaN until defined)

  // Mismatched-model baseline.
  double mse_correct = 0.0;   // Tr(Cov(u | z)) under the true model
};

struct RunResult {
  std::vector<RoundRecord> rounds;
  Index stop_round = 0;       // rounds executed
  bool reached_target = false;
  double final_mse_theory = 0.0;
  double final_sqerr = 0.0;
  std::vector<Index> request_order;  // nodes requested, in request order
};

struct RoundSummary {
  Index t = 0;
  Index runs_active = 0;
  double known = 0.0;
  double delivered = 0.0;
  double collided = 0.0;
  double expected_delivered = 0.0;
  double mse_theory = 0.0;
  double sqerr_actual = 0.0;
  // Bandit only.
  std::vector<double> model_freq;
  double cost = 0.0;          // mean over rounds with a cost sample
  Index cost_samples = 0;
  double pred_sqerr = 0.0;
  double pred_mse = 0.0;
  double mse_correct = 0.0;
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<RunResult> runs;
  std::vector<RoundSummary> per_round;
  double mean_stop_round = 0.0;
  Index runs_reached_target = 0;
  double mean_final_mse = 0.0;
  double mean_final_sqerr = 0.0;
  // Closed-form references for the configured target.
  double bound_polling = 0.0;
  double bound_aloha_exact = 0.0;
  double bound_aloha_approx = 0.0;
};

// Seed of run `run_id` derived from the scenario seed.
std::uint64_t run_seed(std::uint64_t seed, Index run_id);

// Polling or ALOHA sessions under build_ar1_model(K, rho).
ScenarioResult run_scenario(const Scenario& s);

// One session; exposed for tests. `estimator` drives selection and estimation,
// `truth` generates the realization.
RunResult simulate_run(const Scenario& s, const GaussianModel& estimator,
                       const GaussianModel& truth, const Matrix& truth_factor, Index run_id);

// Softmax model selection over the model family.
ScenarioResult run_bandit_scenario(const Scenario& s);

// DAS under the fixed `baseline_model` while data follow `true_model`;
// records carry mse_correct for comparison.
ScenarioResult run_mismatch_baseline(const Scenario& s);

enum class SweepParam { p, N };

struct SweepRow {
  SweepParam param = SweepParam::p;
  double value = 0.0;
  AccessMode mode = AccessMode::polling;
  double mse_theory = 0.0;
  double sqerr_actual = 0.0;
  double delivered_total = 0.0;
  bool aloha_favored = false;  // crossover_check(p)
};

// Final MSE after s.max_rounds rounds for both access schemes at each value.
std::vector<SweepRow> sweep(const Scenario& s, SweepParam param, const std::vector<double>& values);

// Aggregates per-run records into per-round means. Means at round t are taken
// over the runs that executed round t.
std::vector<RoundSummary> summarize(const std::vector<RunResult>& runs, Index M);

}  // namespace das
