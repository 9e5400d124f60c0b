#include "das/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "das/bandit.hpp"
#include "das/error.hpp"

namespace das {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
void parallel_for(Index count, Index threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (Index w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (Index i = next++; i < count && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Vector draw_realization(const GaussianModel& truth, const Matrix& factor, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector w(static_cast<Eigen::Index>(truth.dim()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = g(rng);
  return truth.mean + factor.triangularView<Eigen::Lower>() * w;
}

Index request_size(const Scenario& s, AccessMode mode, double p, Index remaining) {
  if (mode == AccessMode::polling) {
    const Index cap = s.q_policy.fixed ? std::min(*s.q_policy.fixed, s.N) : s.N;
    return std::min(cap, remaining);
  }
  if (s.q_policy.fixed) return std::min(*s.q_policy.fixed, remaining);
  return optimal_q(s.N, p, remaining);
}

std::vector<Index> random_request(const ConditionalState& cond, Index Q, Rng& rng) {
  std::vector<Index> out;
  out.reserve(Q);
  std::sample(cond.unknown_idx.begin(), cond.unknown_idx.end(), std::back_inserter(out), Q, rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

RoundOutcome access_round(AccessMode mode, std::span<const Index> requested, Index N,
                          std::span<const double> probs, Rng& rng) {
  return mode == AccessMode::polling ? polling_round(requested, N, probs, rng)
                                     : aloha_round(requested, N, probs, rng);
}

void condition_in_place(ConditionalState& cond, const Vector& x, std::span<const Index> nodes) {
  for (Index node : nodes) {
    const auto local = cond.local_of(node);
    if (!local) throw ContractViolation("delivered node is already known");
    if (cond.cond_cov(*local, *local) > kVarianceFloor) {
      cond = rank_one_condition(cond, *local, x(node));
    } else {
      cond = drop_node(cond, *local);
    }
  }
}

double squared_error(const ConditionalState& cond, const Vector& x) {
  double e = 0.0;
  for (Index i = 0; i < cond.unknown_count(); ++i) {
    const double d = x(cond.unknown_idx[i]) - cond.cond_mean(i);
    e += d * d;
  }
  return e;
}

void fill_totals(ScenarioResult& r, double p) {
  const Scenario& s = r.scenario;
  double stop = 0.0, mse = 0.0, sq = 0.0;
  for (const auto& run : r.runs) {
    stop += static_cast<double>(run.stop_round);
    mse += run.final_mse_theory;
    sq += run.final_sqerr;
    if (run.reached_target) ++r.runs_reached_target;
  }
  const double n = static_cast<double>(r.runs.size());
  r.mean_stop_round = stop / n;
  r.mean_final_mse = mse / n;
  r.mean_final_sqerr = sq / n;
  const double target = static_cast<double>(s.stop_threshold());
  const Index q = s.q_policy.fixed ? *s.q_policy.fixed : optimal_q(s.N, p, s.K);
  r.bound_polling = mean_rounds_bound(RoundsBound::polling, target, s.N, p, q);
  r.bound_aloha_exact = mean_rounds_bound(RoundsBound::aloha_exact, target, s.N, p, q);
  r.bound_aloha_approx = mean_rounds_bound(RoundsBound::aloha_approx, target, s.N, p, q);
}

RunResult simulate_session(const Scenario& s, const GaussianModel& estimator,
                           const GaussianModel& truth, const Matrix& truth_factor, Index run_id,
                           bool track_truth) {
  const std::uint64_t seed = run_seed(s.seed, run_id);
  Rng rng(seed);
  const ChannelConfig cfg = s.channel_config();
  const double p = cfg.mean_probability();
  const AccessMode mode = s.access_mode();
  const Index target = s.stop_threshold();

  SensingState st = start_session(estimator, draw_realization(truth, truth_factor, rng));
  ConditionalState truth_cond;
  if (track_truth) truth_cond = unconditioned(truth);

  RunResult out;
  for (Index t = 0; t < s.max_rounds; ++t) {
    const Index remaining = st.cond.unknown_count();
    if (remaining == 0 || st.acc_idx.size() >= target) break;
    Rng round_rng(derive_seed(seed, t + 1));
    const Index Q = request_size(s, mode, p, remaining);
    const std::vector<Index> requested =
        (t == 0 && s.first_round == FirstRound::random)
            ? random_request(st.cond, Q, round_rng)
            : select_nodes(st.cond, Q, s.selection);
    const RoundOutcome outcome = access_round(mode, requested, s.N, cfg.upload_prob, round_rng);
    out.request_order.insert(out.request_order.end(), requested.begin(), requested.end());

    RoundRecord rec;
    rec.run = run_id;
    rec.t = t;
    rec.known = st.acc_idx.size();
    rec.requested = requested.size();
    rec.delivered = outcome.delivered.size();
    rec.collided = outcome.collisions.size();
    rec.expected_delivered = expected_successes(mode, s.N, p, Q);
    st = ingest_nodes(st, outcome.delivered);
    rec.mse_theory = st.mse_theory;
    rec.sqerr_actual = st.sqerr_actual;
    if (track_truth) {
      condition_in_place(truth_cond, st.target, outcome.delivered);
      rec.mse_correct = truth_cond.total_variance();
    }
    out.rounds.push_back(std::move(rec));
    out.stop_round = t + 1;
    if (st.acc_idx.size() >= target) {
      out.reached_target = true;
      break;
    }
  }
  out.final_mse_theory = st.mse_theory;
  out.final_sqerr = st.sqerr_actual;
  return out;
}

ScenarioResult run_sessions(const Scenario& s, const GaussianModel& estimator,
                            const GaussianModel& truth, bool track_truth) {
  s.validate();
  const Matrix factor = sampling_factor(truth);
  ScenarioResult r;
  r.scenario = s;
  r.runs.resize(s.runs);
  parallel_for(s.runs, s.threads, [&](Index i) {
    r.runs[i] = simulate_session(s, estimator, truth, factor, i, track_truth);
  });
  r.per_round = summarize(r.runs, 0);
  fill_totals(r, s.channel_config().mean_probability());
  return r;
}

RunResult simulate_bandit_run(const Scenario& s, const std::vector<GaussianModel>& family,
                              const Matrix& truth_factor, Index run_id) {
  const std::uint64_t seed = run_seed(s.seed, run_id);
  Rng rng(seed);
  const ChannelConfig cfg = s.channel_config();
  const double p = cfg.mean_probability();
  const AccessMode mode = s.access_mode();
  const Index target = s.stop_threshold();
  const Index M = family.size();
  const GaussianModel& truth = family[s.true_model - 1];

  SensingState st = start_session(truth, draw_realization(truth, truth_factor, rng));
  std::vector<ConditionalState> arms;
  arms.reserve(M);
  for (const auto& g : family) arms.push_back(unconditioned(g));
  BanditState bandit = BanditState::create(M, s.tau);

  RunResult out;
  for (Index t = 0; t < s.max_rounds; ++t) {
    const Index remaining = st.cond.unknown_count();
    if (remaining == 0 || st.acc_idx.size() >= target) break;
    Rng round_rng(derive_seed(seed, t + 1));
    const Index m = select_model(bandit, t, round_rng);
    const ConditionalState& arm = arms[m];
    const Index Q = request_size(s, mode, p, remaining);
    const std::vector<Index> requested =
        (t == 0 && s.first_round == FirstRound::random)
            ? random_request(arm, Q, round_rng)
            : select_nodes(arm, Q, s.selection);
    const RoundOutcome outcome = access_round(mode, requested, s.N, cfg.upload_prob, round_rng);
    out.request_order.insert(out.request_order.end(), requested.begin(), requested.end());

    RoundRecord rec;
    rec.run = run_id;
    rec.t = t;
    rec.known = st.acc_idx.size();
    rec.requested = requested.size();
    rec.delivered = outcome.delivered.size();
    rec.collided = outcome.collisions.size();
    rec.expected_delivered = expected_successes(mode, s.N, p, Q);
    rec.model = m + 1;

    std::vector<double> vals;
    vals.reserve(outcome.delivered.size());
    for (Index node : outcome.delivered) vals.push_back(st.target(node));
    rec.cost = kNaN;
    for (std::size_t i = 0; i < outcome.delivered.size(); ++i) {
      const Index local = *arm.local_of(outcome.delivered[i]);
      const double d = vals[i] - arm.cond_mean(local);
      rec.pred_sqerr += d * d;
      rec.pred_mse += arm.cond_cov(local, local);
    }
    if (const auto y = round_cost(arm, outcome.delivered, vals)) {
      rec.cost = *y;
      bandit = update(std::move(bandit), m, *y);
    }

    for (auto& a : arms) condition_in_place(a, st.target, outcome.delivered);
    st = ingest_nodes(st, outcome.delivered);
    rec.mse_theory = st.mse_theory;
    rec.sqerr_actual = squared_error(arms[m], st.target);
    rec.mse_correct = st.mse_theory;
    const bool ready = std::all_of(bandit.count.begin(), bandit.count.end(),
                                   [](Index c) { return c > 0; });
    rec.probs = ready ? softmax_probs(bandit) : std::vector<double>(M, kNaN);
    out.rounds.push_back(std::move(rec));
    out.stop_round = t + 1;
    if (st.acc_idx.size() >= target) {
      out.reached_target = true;
      break;
    }
  }
  out.final_mse_theory = st.mse_theory;
  out.final_sqerr = st.sqerr_actual;
  return out;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t seed, Index run_id) { return derive_seed(seed, run_id); }

RunResult simulate_run(const Scenario& s, const GaussianModel& estimator,
                       const GaussianModel& truth, const Matrix& truth_factor, Index run_id) {
  return simulate_session(s, estimator, truth, truth_factor, run_id, false);
}

ScenarioResult run_scenario(const Scenario& s) {
  if (s.mode == Mode::bandit) throw ValidationError("run_scenario: use run_bandit_scenario for bandit mode");
  const GaussianModel model = build_ar1_model(s.K, s.rho);
  return run_sessions(s, model, model, false);
}

ScenarioResult run_bandit_scenario(const Scenario& s) {
  if (s.mode != Mode::bandit) throw ValidationError("run_bandit_scenario: scenario mode must be bandit");
  s.validate();
  const auto family = build_model_family(s.K, s.J, s.noise, s.M, s.rho);
  const Matrix factor = sampling_factor(family[s.true_model - 1]);
  ScenarioResult r;
  r.scenario = s;
  r.runs.resize(s.runs);
  parallel_for(s.runs, s.threads,
               [&](Index i) { r.runs[i] = simulate_bandit_run(s, family, factor, i); });
  r.per_round = summarize(r.runs, s.M);
  fill_totals(r, s.channel_config().mean_probability());
  return r;
}

ScenarioResult run_mismatch_baseline(const Scenario& s) {
  s.validate();
  const auto family = build_model_family(s.K, s.J, s.noise, s.M, s.rho);
  return run_sessions(s, family[s.baseline_model - 1], family[s.true_model - 1], true);
}

std::vector<SweepRow> sweep(const Scenario& s, SweepParam param, const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    Scenario base = s;
    if (param == SweepParam::p) {
      base.p = v;
      base.threshold_snr.reset();
    } else {
      if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError("N sweep values must be positive integers");
      base.N = static_cast<Index>(v);
    }
    for (Mode mode : {Mode::polling, Mode::aloha}) {
      Scenario run = base;
      run.mode = mode;
      const ScenarioResult r = run_scenario(run);
      SweepRow row;
      row.param = param;
      row.value = v;
      row.mode = run.access_mode();
      row.mse_theory = r.mean_final_mse;
      row.sqerr_actual = r.mean_final_sqerr;
      double delivered = 0.0;
      for (const auto& rr : r.runs)
        for (const auto& rec : rr.rounds) delivered += static_cast<double>(rec.delivered);
      row.delivered_total = delivered / static_cast<double>(r.runs.size());
      row.aloha_favored = crossover_check(run.channel_config().mean_probability());
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<RoundSummary> summarize(const std::vector<RunResult>& runs, Index M) {
  Index horizon = 0;
  for (const auto& r : runs) horizon = std::max<Index>(horizon, r.rounds.size());
  std::vector<RoundSummary> out(horizon);
  for (Index t = 0; t < horizon; ++t) {
    RoundSummary& s = out[t];
    s.t = t;
    s.model_freq.assign(M, 0.0);
    for (const auto& r : runs) {
      if (t >= r.rounds.size()) continue;
      const RoundRecord& rec = r.rounds[t];
      ++s.runs_active;
      s.known += static_cast<double>(rec.known);
      s.delivered += static_cast<double>(rec.delivered);
      s.collided += static_cast<double>(rec.collided);
      s.expected_delivered += rec.expected_delivered;
      s.mse_theory += rec.mse_theory;
      s.sqerr_actual += rec.sqerr_actual;
      s.pred_sqerr += rec.pred_sqerr;
      s.pred_mse += rec.pred_mse;
      s.mse_correct += rec.mse_correct;
      if (M > 0 && rec.model >= 1 && rec.model <= M) s.model_freq[rec.model - 1] += 1.0;
      if (!std::isnan(rec.cost) && rec.model > 0) {
        s.cost += rec.cost;
        ++s.cost_samples;
      }
    }
    const double n = static_cast<double>(s.runs_active);
    for (double* f : {&s.known, &s.delivered, &s.collided, &s.expected_delivered, &s.mse_theory,
                      &s.sqerr_actual, &s.pred_sqerr, &s.pred_mse, &s.mse_correct})
      *f /= n;
    for (double& f : s.model_freq) f /= n;
    s.cost = s.cost_samples > 0 ? s.cost / static_cast<double>(s.cost_samples) : kNaN;
  }
  return out;
}

}  // namespace das
