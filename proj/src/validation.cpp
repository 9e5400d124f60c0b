#include "das/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "das/bandit.hpp"
#include "das/engine.hpp"

namespace das::validation {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario reference_scenario(Mode mode, const Options& opt) {
  Scenario s;
  s.mode = mode;
  s.K = 100;
  s.rho = 0.95;
  s.N = 4;
  s.p = 0.2;
  s.seed = opt.seed;
  s.threads = opt.threads;
  return s;
}

Scenario bandit_scenario(double tau, const Options& opt) {
  Scenario s = reference_scenario(Mode::bandit, opt);
  s.tau = tau;
  s.runs = 200;
  s.max_rounds = 120;
  return s;
}

// Last round index (exclusive) that every run executed.
Index common_horizon(const ScenarioResult& r) {
  Index h = r.runs.empty() ? 0 : r.runs.front().rounds.size();
  for (const auto& run : r.runs) h = std::min<Index>(h, run.rounds.size());
  return h;
}

}  // namespace

double conditional_mse_after(const GaussianModel& model, const std::vector<Index>& known,
                             const std::vector<Index>& extra) {
  std::vector<Index> idx = known;
  idx.insert(idx.end(), extra.begin(), extra.end());
  const std::vector<double> vals(idx.size(), 0.0);
  return condition(model, idx, vals).total_variance();
}

Matrix random_covariance(Index K, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(K);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = g(rng);
  Matrix c = a * a.transpose() / static_cast<double>(K);
  c.diagonal().array() += 0.05;
  return 0.5 * (c + c.transpose());
}

CheckResult check_round_counts(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"1", "round counts to collect 75 of 100 measurements", false, "", 0.0};
  Scenario s = reference_scenario(Mode::polling, opt);
  s.target_known = 75;
  s.max_rounds = 1000;
  s.runs = 500;
  const ScenarioResult polling = run_scenario(s);
  s.mode = Mode::aloha;
  const ScenarioResult aloha = run_scenario(s);
  r.seconds = seconds_since(start);
  const bool all_done = polling.runs_reached_target == s.runs && aloha.runs_reached_target == s.runs;
  const double tp = polling.mean_stop_round;
  const double ta = aloha.mean_stop_round;
  r.passed = all_done && tp >= 89.1 && tp <= 98.4 && ta >= 49.7 && ta <= 56.0 && ta >= 49.0 &&
             r.seconds < 30.0;
  r.detail = fmt("polling %.3f in [89.1, 98.4] (bound %.2f); aloha %.3f in [49.7, 56.0] "
                 "(exact bound %.2f, approx %.2f); %.1f s < 30 s",
                 tp, polling.bound_polling, ta, aloha.bound_aloha_exact, aloha.bound_aloha_approx,
                 r.seconds);
  return r;
}

CheckResult check_throughput(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"2", "multichannel ALOHA throughput vs closed form", false, "", 0.0};
  constexpr Index Q = 20, N = 4, rounds = 100000;
  constexpr double p = 0.2;
  std::vector<Index> requested(Q);
  for (Index i = 0; i < Q; ++i) requested[i] = i;
  const std::vector<double> probs(Q, p);
  Rng rng(derive_seed(opt.seed, 2));
  double total = 0.0;
  for (Index i = 0; i < rounds; ++i)
    total += static_cast<double>(aloha_round(requested, N, probs, rng).delivered.size());
  const double mean = total / static_cast<double>(rounds);
  const double expect = expected_successes(AccessMode::aloha, N, p, Q);
  r.seconds = seconds_since(start);
  const double rel = std::abs(mean - expect) / expect;
  r.passed = rel <= 0.03 && r.seconds < 5.0;
  r.detail = fmt("empirical %.5f vs %.5f (rel %.4f <= 0.03); %.2f s < 5 s", mean, expect, rel,
                 r.seconds);
  return r;
}

CheckResult check_crossover(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"3", "polling/ALOHA MSE ordering around p = 1/e", true, "", 0.0};
  Scenario s = reference_scenario(Mode::aloha, opt);
  s.max_rounds = 75;
  s.runs = 100;
  const std::vector<double> ps{0.1, 0.2, 0.3, 0.45, 0.6};
  const auto rows = sweep(s, SweepParam::p, ps);
  std::ostringstream d;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double polling = rows[2 * i].mse_theory;
    const double aloha = rows[2 * i + 1].mse_theory;
    const bool aloha_better = ps[i] < std::exp(-1.0);
    const bool ok = aloha_better ? aloha < polling : polling < aloha;
    r.passed = r.passed && ok;
    d << fmt("p=%.2f polling %.4g aloha %.4g %s; ", ps[i], polling, aloha, ok ? "ok" : "WRONG ORDER");
  }
  r.seconds = seconds_since(start);
  r.detail = d.str();
  return r;
}

CheckResult check_conditioning_oracle(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"4", "rank-one conditioning matches batch conditioning", true, "", 0.0};
  Rng rng(derive_seed(opt.seed, 4));
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index K = std::uniform_int_distribution<Index>(1, 50)(rng);
    GaussianModel model{Vector(static_cast<Eigen::Index>(K)), random_covariance(K, rng)};
    for (Eigen::Index i = 0; i < model.mean.size(); ++i) model.mean(i) = g(rng);
    std::vector<Index> order(K);
    for (Index i = 0; i < K; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const Index depth = std::uniform_int_distribution<Index>(1, K)(rng);
    order.resize(depth);
    std::vector<double> vals(depth);
    for (double& v : vals) v = 2.0 * g(rng);

    ConditionalState inc = unconditioned(model);
    for (Index i = 0; i < depth; ++i) inc = rank_one_condition(inc, *inc.local_of(order[i]), vals[i]);
    const ConditionalState batch = condition(model, order, vals);
    double err = 0.0;
    if (inc.unknown_idx != batch.unknown_idx) err = INFINITY;
    else if (inc.unknown_count() > 0)
      err = std::max((inc.cond_cov - batch.cond_cov).cwiseAbs().maxCoeff(),
                     (inc.cond_mean - batch.cond_mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
  }
  r.passed = worst <= 1e-8;
  r.seconds = seconds_since(start);
  r.detail = fmt("200 models, worst entrywise difference %.3g <= 1e-8", worst);
  return r;
}

namespace {

struct GreedyTrial {
  GaussianModel model;
  std::vector<Index> known;
  ConditionalState state;
};

GreedyTrial make_greedy_trial(Index trial, Rng& rng) {
  const Index K = 2 + trial % 9;
  GreedyTrial t;
  if (trial % 2 == 0) {
    const double rho = std::uniform_real_distribution<double>(-0.95, 0.95)(rng);
    t.model = build_ar1_model(K, rho);
  } else {
    t.model = GaussianModel{Vector::Zero(static_cast<Eigen::Index>(K)), random_covariance(K, rng)};
  }
  std::vector<Index> order(K);
  for (Index i = 0; i < K; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const Index depth = std::uniform_int_distribution<Index>(0, K - 2)(rng);
  t.known.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(depth));
  const std::vector<double> vals(depth, 0.0);
  t.state = condition(t.model, t.known, vals);
  return t;
}

}  // namespace

CheckResult check_greedy_single(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"5a", "greedy Q=1 equals exhaustive argmin", false, "", 0.0};
  Rng rng(derive_seed(opt.seed, 51));
  Index matches = 0;
  constexpr Index trials = 1000;
  for (Index trial = 0; trial < trials; ++trial) {
    const GreedyTrial t = make_greedy_trial(trial, rng);
    const Index pick = select_nodes(t.state, 1).front();
    std::vector<double> mses;
    for (Index node : t.state.unknown_idx) mses.push_back(conditional_mse_after(t.model, t.known, {node}));
    const double best_mse = *std::min_element(mses.begin(), mses.end());
    const double tol = 1e-9 * std::max(t.state.total_variance(), 1e-300);
    // Nodes within tol of the minimum are numerically tied; any of them is the argmin.
    const auto at = std::find(t.state.unknown_idx.begin(), t.state.unknown_idx.end(), pick);
    const bool best = at != t.state.unknown_idx.end() &&
                      mses[static_cast<std::size_t>(at - t.state.unknown_idx.begin())] <= best_mse + tol;
    if (best) ++matches;
  }
  r.passed = matches == trials;
  r.seconds = seconds_since(start);
  r.detail = fmt("%zu / %zu trials agree", matches, trials);
  return r;
}

CheckResult check_greedy_pair(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"5b", "greedy Q=2 within 5% of exhaustive pair optimum", false, "", 0.0};
  Rng rng(derive_seed(opt.seed, 52));
  Index within = 0;
  double worst = 1.0;
  Index worst_trial = 0;
  constexpr Index trials = 1000;
  for (Index trial = 0; trial < trials; ++trial) {
    const GreedyTrial t = make_greedy_trial(trial, rng);
    const auto pair = select_nodes(t.state, 2);
    const double achieved = conditional_mse_after(t.model, t.known, pair);
    double opt_mse = INFINITY;
    const auto& u = t.state.unknown_idx;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = i + 1; j < u.size(); ++j)
        opt_mse = std::min(opt_mse, conditional_mse_after(t.model, t.known, {u[i], u[j]}));
    const double slack = 1e-12 * std::max(t.state.total_variance(), 1.0);
    if (achieved <= 1.05 * opt_mse + slack) ++within;
    const double ratio = opt_mse > slack ? achieved / opt_mse : 1.0;
    if (ratio > worst) {
      worst = ratio;
      worst_trial = trial;
    }
  }
  r.passed = within == trials;
  r.seconds = seconds_since(start);
  r.detail = fmt("%zu / %zu trials within 5%%; worst ratio %.4f (trial %zu)", within, trials, worst,
                 worst_trial);
  return r;
}

CheckResult check_mse_calibration(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"6", "MSE monotone and empirical error tracks it within 15%", true, "", 0.0};
  std::ostringstream d;
  for (Mode mode : {Mode::polling, Mode::aloha}) {
    Scenario s = reference_scenario(mode, opt);
    s.target_known = 75;
    s.max_rounds = 1000;
    s.runs = 100;
    const ScenarioResult res = run_scenario(s);
    Index violations = 0;
    for (const auto& run : res.runs) {
      double prev = INFINITY;
      for (const auto& rec : run.rounds) {
        if (rec.mse_theory > prev * (1.0 + 1e-12) + 1e-12) ++violations;
        prev = rec.mse_theory;
      }
    }
    const Index horizon = common_horizon(res);
    double worst = 0.0;
    Index worst_t = 0;
    for (Index t = 0; t < horizon; ++t) {
      const auto& row = res.per_round[t];
      const double rel = std::abs(row.sqerr_actual - row.mse_theory) / row.mse_theory;
      if (rel > worst) {
        worst = rel;
        worst_t = t;
      }
    }
    const bool ok = violations == 0 && worst <= 0.15;
    r.passed = r.passed && ok;
    d << fmt("%s: %zu monotonicity violations, worst relative gap %.4f at t=%zu over %zu rounds; ",
             to_string(mode).c_str(), violations, worst, worst_t, horizon);
  }
  r.seconds = seconds_since(start);
  r.detail = d.str();
  return r;
}

CheckResult check_predetermined_order(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"7", "p = 1 selection order is realization independent", false, "", 0.0};
  Scenario s = reference_scenario(Mode::polling, opt);
  s.p = 1.0;
  s.N = 1;
  s.first_round = FirstRound::greedy;
  s.runs = 100;
  s.max_rounds = s.K;
  const ScenarioResult res = run_scenario(s);
  const auto expected = polling_order(build_ar1_model(s.K, s.rho));
  Index identical = 0;
  for (const auto& run : res.runs)
    if (run.request_order == expected) ++identical;
  r.passed = identical == s.runs;
  r.seconds = seconds_since(start);
  r.detail = fmt("%zu / %zu realizations follow the precomputed order (first node %zu)", identical,
                 s.runs, expected.front() + 1);
  return r;
}

CheckResult check_bandit_greedy_temperature(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"8a", "tau = 1: correct model is the per-round favourite for t >= 2M", false, "", 0.0};
  const Scenario s = bandit_scenario(1.0, opt);
  const ScenarioResult res = run_bandit_scenario(s);
  r.detail = check_bandit_result(res).detail;
  r.passed = check_bandit_result(res).passed;
  r.seconds = seconds_since(start);
  return r;
}

CheckResult check_bandit_hot_temperature(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"8b", "tau = 20: correct model chosen with frequency 0.2 +- 0.07", false, "", 0.0};
  const Scenario s = bandit_scenario(20.0, opt);
  const ScenarioResult res = run_bandit_scenario(s);
  const CheckResult c = check_bandit_result(res);
  r.passed = c.passed;
  r.detail = c.detail;
  r.seconds = seconds_since(start);
  return r;
}

CheckResult check_true_model_cost(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"8c", "mean round cost under the true model is 1 +- 5%", false, "", 0.0};
  const GaussianModel model = build_ar1_model(100, 0.95);
  const Matrix factor = sampling_factor(model);
  const std::vector<double> probs(100, 0.2);
  std::normal_distribution<double> g(0.0, 1.0);
  double total = 0.0;
  Index samples = 0;
  for (Index run = 0; samples < 10000; ++run) {
    Rng rng(derive_seed(opt.seed ^ 0x8c, run));
    Vector w(100);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = g(rng);
    SensingState st = start_session(model, model.mean + factor.triangularView<Eigen::Lower>() * w);
    while (st.cond.unknown_count() > 0 && samples < 10000) {
      const Index Q = optimal_q(4, 0.2, st.cond.unknown_count());
      const auto out = aloha_round(select_nodes(st, Q), 4, probs, rng);
      std::vector<double> vals;
      for (Index node : out.delivered) vals.push_back(st.target(node));
      if (const auto y = round_cost(st.cond, out.delivered, vals)) {
        total += *y;
        ++samples;
      }
      st = ingest_nodes(st, out.delivered);
    }
  }
  const double mean = total / static_cast<double>(samples);
  r.passed = std::abs(mean - 1.0) <= 0.05;
  r.seconds = seconds_since(start);
  r.detail = fmt("mean cost %.4f over %zu samples", mean, samples);
  return r;
}

CheckResult check_softmax(const Options& opt) {
  const auto start = Clock::now();
  CheckResult r{"9", "softmax shift invariance, high-temperature limit, closed form", false, "", 0.0};
  Rng rng(derive_seed(opt.seed, 9));
  std::uniform_real_distribution<double> u(0.0, 10.0);
  double shift_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    BanditState a = BanditState::create(5, 0.5 + u(rng));
    for (Index m = 0; m < 5; ++m) a = update(std::move(a), m, u(rng));
    BanditState b = a;
    const double c = u(rng);
    for (Index m = 0; m < 5; ++m) b.cost_sum[m] += c * static_cast<double>(b.count[m]);
    const auto pa = softmax_probs(a), pb = softmax_probs(b);
    for (Index m = 0; m < 5; ++m) shift_err = std::max(shift_err, std::abs(pa[m] - pb[m]));
  }
  BanditState hot = BanditState::create(5, 1e9);
  for (Index m = 0; m < 5; ++m) hot = update(std::move(hot), m, static_cast<double>(m) * 3.0);
  double uniform_err = 0.0;
  for (double p : softmax_probs(hot)) uniform_err = std::max(uniform_err, std::abs(p - 0.2));
  BanditState two = BanditState::create(2, 1.0);
  two = update(std::move(two), 0, 1.0);
  two = update(std::move(two), 1, 2.0);
  const double p1 = softmax_probs(two)[0];
  const double closed = 1.0 / (1.0 + std::exp(-1.0));
  r.passed = shift_err <= 1e-12 && uniform_err <= 1e-6 && std::abs(p1 - closed) <= 1e-9;
  r.seconds = seconds_since(start);
  r.detail = fmt("shift error %.2g <= 1e-12; uniform error %.2g <= 1e-6; P_1 = %.11f (|diff| %.2g <= 1e-9)",
                 shift_err, uniform_err, p1, std::abs(p1 - closed));
  return r;
}

std::vector<NamedCheck> acceptance_checks() {
  return {{"1", check_round_counts},           {"2", check_throughput},
          {"3", check_crossover},              {"4", check_conditioning_oracle},
          {"5a", check_greedy_single},         {"5b", check_greedy_pair},
          {"6", check_mse_calibration},        {"7", check_predetermined_order},
          {"8a", check_bandit_greedy_temperature}, {"8b", check_bandit_hot_temperature},
          {"8c", check_true_model_cost},       {"9", check_softmax}};
}

std::vector<CheckResult> run_acceptance(const Options& opt, std::ostream* log,
                                        const std::vector<std::string>& only) {
  std::vector<CheckResult> out;
  for (const auto& c : acceptance_checks()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    out.push_back(c.run(opt));
    if (log) {
      const auto& res = out.back();
      *log << (res.passed ? "PASS" : "FAIL") << "  [" << res.id << "] " << res.name << " :: "
           << res.detail << fmt(" (%.2f s)", res.seconds) << std::endl;
    }
  }
  return out;
}

CheckResult check_run_result(const ScenarioResult& r) {
  CheckResult c{"run", "mean stop round against closed-form round counts", false, "", 0.0};
  const Scenario& s = r.scenario;
  if (r.runs_reached_target != r.runs.size()) {
    c.detail = fmt("%zu of %zu runs reached the target within %zu rounds", r.runs_reached_target,
                   r.runs.size(), s.max_rounds);
    return c;
  }
  if (s.mode == Mode::polling) {
    const double rel = std::abs(r.mean_stop_round - r.bound_polling) / r.bound_polling;
    c.passed = rel <= 0.05;
    c.detail = fmt("mean stop round %.3f vs %.3f (rel %.4f <= 0.05)", r.mean_stop_round,
                   r.bound_polling, rel);
  } else {
    const double lo = 0.986 * r.bound_aloha_exact;
    const double hi = 1.10 * r.bound_aloha_approx;
    c.passed = r.mean_stop_round >= lo && r.mean_stop_round <= hi;
    c.detail = fmt("mean stop round %.3f in [%.3f, %.3f]", r.mean_stop_round, lo, hi);
  }
  return c;
}

CheckResult check_sweep_result(const std::vector<SweepRow>& rows) {
  CheckResult c{"sweep", "MSE ordering across the sweep", true, "", 0.0};
  std::ostringstream d;
  std::vector<const SweepRow*> polling, aloha;
  for (const auto& row : rows) (row.mode == AccessMode::polling ? polling : aloha).push_back(&row);
  for (std::size_t i = 0; i < std::min(polling.size(), aloha.size()); ++i) {
    if (polling[i]->param != SweepParam::p) break;
    const double p = polling[i]->value;
    if (std::abs(p - std::exp(-1.0)) < 0.05) continue;  // too close to the crossover to call
    const bool ok = crossover_check(p) ? aloha[i]->mse_theory < polling[i]->mse_theory
                                       : polling[i]->mse_theory < aloha[i]->mse_theory;
    c.passed = c.passed && ok;
    if (!ok) d << fmt("p=%.3f ordering wrong; ", p);
  }
  for (const auto* list : {&polling, &aloha}) {
    for (std::size_t i = 1; i < list->size(); ++i) {
      const SweepRow& a = *(*list)[i - 1];
      const SweepRow& b = *(*list)[i];
      if (a.param == SweepParam::N && b.value > a.value && !(b.mse_theory < a.mse_theory)) {
        c.passed = false;
        d << fmt("%s: MSE not decreasing from N=%g to N=%g; ", to_string(a.mode).c_str(), a.value,
                 b.value);
      }
    }
  }
  c.detail = c.passed ? "ordering as expected" : d.str();
  return c;
}

CheckResult check_bandit_result(const ScenarioResult& r) {
  const Scenario& s = r.scenario;
  CheckResult c{"bandit", "model selection frequencies", false, "", 0.0};
  const Index truth = s.true_model - 1;
  const Index horizon = common_horizon(r);
  if (s.tau >= 10.0) {
    double hits = 0.0, total = 0.0;
    for (const auto& run : r.runs)
      for (const auto& rec : run.rounds)
        if (rec.t >= s.M) {
          total += 1.0;
          if (rec.model == truth + 1) hits += 1.0;
        }
    const double freq = hits / total;
    const double target = 1.0 / static_cast<double>(s.M);
    c.passed = std::abs(freq - target) <= 0.07;
    c.detail = fmt("correct-model frequency %.4f over %.0f selections, target %.2f +- 0.07", freq,
                   total, target);
    return c;
  }
  Index bad = 0, checked = 0, first_bad = 0;
  for (Index t = 2 * s.M; t < horizon; ++t) {
    const auto& f = r.per_round[t].model_freq;
    ++checked;
    for (Index m = 0; m < s.M; ++m) {
      if (m != truth && !(f[truth] > f[m])) {
        if (bad == 0) first_bad = t;
        ++bad;
        break;
      }
    }
  }
  c.passed = bad == 0 && checked > 0;
  c.detail = fmt("correct model strictly most frequent in %zu / %zu rounds (t = %zu..%zu, all runs active)%s",
                 checked - bad, checked, 2 * s.M, horizon == 0 ? 0 : horizon - 1,
                 bad ? fmt("; first miss at t=%zu", first_bad).c_str() : "");
  return c;
}

CheckResult check_baseline_result(const ScenarioResult& r) {
  CheckResult c{"baseline", "mismatched-model empirical MSE above correct-model MSE", true, "", 0.0};
  Index bad = 0;
  for (const auto& row : r.per_round)
    if (row.sqerr_actual < row.mse_correct) ++bad;
  c.passed = bad == 0;
  c.detail = fmt("%zu of %zu rounds violate the ordering", bad, r.per_round.size());
  return c;
}

}  // namespace das::validation
