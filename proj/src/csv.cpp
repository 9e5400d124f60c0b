#include "das/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace das::csv {
namespace {

bool is_bandit(const ScenarioResult& r) { return r.scenario.mode == Mode::bandit; }

void schema(std::ostream& out, const char* kind) {
  out << "# das-sim " << kind << " v" << kSchemaVersion << '\n';
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_records(std::ostream& out, const ScenarioResult& result) {
  const bool bandit = is_bandit(result);
  const Index M = result.scenario.M;
  schema(out, "records");
  out << "run,t,K_t,requested,delivered,collided,expected_delivered,mse_theory,sqerr_actual";
  if (bandit) {
    out << ",model,cost,pred_sqerr,pred_mse";
    for (Index m = 1; m <= M; ++m) out << ",P_" << m;
  }
  out << ",mse_correct\n";
  // result.runs is indexed by run id and rounds are stored in order, so this
  // traversal is already sorted by (run, t).
  for (const auto& run : result.runs) {
    for (const auto& r : run.rounds) {
      out << r.run << ',' << r.t << ',' << r.known << ',' << r.requested << ',' << r.delivered
          << ',' << r.collided << ',' << format_real(r.expected_delivered) << ','
          << format_real(r.mse_theory) << ',' << format_real(r.sqerr_actual);
      if (bandit) {
        out << ',' << r.model << ',' << format_real(r.cost) << ',' << format_real(r.pred_sqerr)
            << ',' << format_real(r.pred_mse);
        for (Index m = 0; m < M; ++m)
          out << ',' << format_real(m < r.probs.size() ? r.probs[m] : std::nan(""));
      }
      out << ',' << format_real(r.mse_correct) << '\n';
    }
  }
}

void write_summary(std::ostream& out, const ScenarioResult& result) {
  const bool bandit = is_bandit(result);
  const Index M = result.scenario.M;
  schema(out, "summary");
  out << "t,runs_active,K_t,delivered,collided,expected_delivered,mse_theory,sqerr_actual";
  if (bandit) {
    out << ",cost,cost_samples,pred_sqerr,pred_mse";
    for (Index m = 1; m <= M; ++m) out << ",freq_" << m;
  }
  out << ",mse_correct\n";
  for (const auto& s : result.per_round) {
    out << s.t << ',' << s.runs_active << ',' << format_real(s.known) << ','
        << format_real(s.delivered) << ',' << format_real(s.collided) << ','
        << format_real(s.expected_delivered) << ',' << format_real(s.mse_theory) << ','
        << format_real(s.sqerr_actual);
    if (bandit) {
      out << ',' << format_real(s.cost) << ',' << s.cost_samples << ','
          << format_real(s.pred_sqerr) << ',' << format_real(s.pred_mse);
      for (Index m = 0; m < M; ++m)
        out << ',' << format_real(m < s.model_freq.size() ? s.model_freq[m] : 0.0);
    }
    out << ',' << format_real(s.mse_correct) << '\n';
  }
}

void write_stop_rounds(std::ostream& out, const ScenarioResult& result) {
  schema(out, "stop_rounds");
  out << "metric,value\n";
  out << "runs," << result.runs.size() << '\n';
  out << "target_known," << result.scenario.stop_threshold() << '\n';
  out << "runs_reached_target," << result.runs_reached_target << '\n';
  out << "mean_stop_round," << format_real(result.mean_stop_round) << '\n';
  out << "bound_polling," << format_real(result.bound_polling) << '\n';
  out << "bound_aloha_exact," << format_real(result.bound_aloha_exact) << '\n';
  out << "bound_aloha_approx," << format_real(result.bound_aloha_approx) << '\n';
  out << "mean_final_mse_theory," << format_real(result.mean_final_mse) << '\n';
  out << "mean_final_sqerr," << format_real(result.mean_final_sqerr) << '\n';
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  schema(out, "sweep");
  out << "param,value,mode,mse_theory,sqerr_actual,delivered_total,aloha_favored\n";
  for (const auto& r : rows) {
    out << (r.param == SweepParam::p ? "p" : "N") << ',' << format_real(r.value) << ','
        << to_string(r.mode) << ',' << format_real(r.mse_theory) << ','
        << format_real(r.sqerr_actual) << ',' << format_real(r.delivered_total) << ','
        << (r.aloha_favored ? 1 : 0) << '\n';
  }
}

}  // namespace das::csv
