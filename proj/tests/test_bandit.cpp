#include <doctest.h>

#include <cmath>

#include "das/access.hpp"
#include "das/bandit.hpp"
#include "das/engine.hpp"
#include "das/error.hpp"

using namespace das;

namespace {

BanditState with_means(const std::vector<double>& psi, double tau) {
  BanditState s = BanditState::create(psi.size(), tau);
  for (Index m = 0; m < psi.size(); ++m) s = update(std::move(s), m, psi[m]);
  return s;
}

// Mean round cost of `estimator` over DAS sessions whose data follow `truth`.
double mean_round_cost(const GaussianModel& estimator, const GaussianModel& truth, Index samples,
                       std::uint64_t seed) {
  const Matrix factor = sampling_factor(truth);
  const Index K = truth.dim();
  const std::vector<double> probs(K, 0.2);
  std::normal_distribution<double> g(0.0, 1.0);
  Rng rng(seed);
  double total = 0.0;
  Index n = 0;
  while (n < samples) {
    Vector w(static_cast<Eigen::Index>(K));
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = g(rng);
    SensingState st = start_session(estimator, truth.mean + factor.triangularView<Eigen::Lower>() * w);
    while (st.cond.unknown_count() > 0 && n < samples) {
      const Index Q = optimal_q(4, 0.2, st.cond.unknown_count());
      const auto out = aloha_round(select_nodes(st, Q), 4, probs, rng);
      std::vector<double> vals;
      for (Index node : out.delivered) vals.push_back(st.target(node));
      if (const auto y = round_cost(st.cond, out.delivered, vals)) {
        total += *y;
        ++n;
      }
      st = ingest_nodes(st, out.delivered);
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("update accumulates the sample mean of one arm") {
  auto s = BanditState::create(3, 1.0);
  CHECK_FALSE(s.psi(0).has_value());
  s = update(std::move(s), 1, 1.0);
  CHECK(*s.psi(1) == 1.0);
  s = update(std::move(s), 1, 3.0);
  CHECK(*s.psi(1) == 2.0);
  CHECK(s.count[0] == 0);
  CHECK(s.count[2] == 0);
  CHECK(s.cost_sum[0] == 0.0);
  CHECK_THROWS_AS(update(s, 5, 1.0), ContractViolation);
  CHECK_THROWS_AS(update(s, 0, -1.0), ContractViolation);
  CHECK_THROWS_AS(BanditState::create(3, 0.0), ValidationError);
}

TEST_CASE("softmax probabilities") {
  const auto eq = softmax_probs(with_means({2.0, 2.0, 2.0, 2.0}, 0.3));
  for (double p : eq) CHECK(p == doctest::Approx(0.25));

  const auto hot = softmax_probs(with_means({0.0, 5.0, 50.0, 500.0, 5000.0}, 1e9));
  for (double p : hot) CHECK(std::abs(p - 0.2) <= 1e-6);

  const auto two = softmax_probs(with_means({1.0, 2.0}, 1.0));
  CHECK(std::abs(two[0] - 1.0 / (1.0 + std::exp(-1.0))) <= 1e-12);
  CHECK(two[0] == doctest::Approx(0.73106).epsilon(1e-5));

  // Extreme costs must not overflow.
  const auto cold = softmax_probs(with_means({1e4, 1.0}, 1e-3));
  CHECK(cold[1] == 1.0);
  CHECK(cold[0] == 0.0);

  CHECK_THROWS_AS(softmax_probs(BanditState::create(2, 1.0)), ContractViolation);
}

TEST_CASE("property: softmax invariants") {
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index M = 2 + trial % 5;
    std::vector<double> psi(M);
    for (double& v : psi) v = u(rng);
    const double tau = 0.05 + u(rng);
    const auto p = softmax_probs(with_means(psi, tau));
    double total = 0.0;
    for (double x : p) total += x;
    CHECK(std::abs(total - 1.0) <= 1e-12);

    std::vector<double> shifted = psi;
    const double c = u(rng);
    for (double& v : shifted) v += c;
    const auto q = softmax_probs(with_means(shifted, tau));
    for (Index m = 0; m < M; ++m) CHECK(std::abs(p[m] - q[m]) <= 1e-12);

    const auto best_p = std::max_element(p.begin(), p.end()) - p.begin();
    const auto best_psi = std::min_element(psi.begin(), psi.end()) - psi.begin();
    CHECK(best_p == best_psi);
  }
}

TEST_CASE("select_model: round robin first, then softmax sampling") {
  Rng rng(32);
  auto s = BanditState::create(5, 1e9);
  for (Index t = 0; t < 5; ++t) {
    CHECK(select_model(s, t, rng) == t);
    s = update(std::move(s), t, static_cast<double>(t));
  }
  std::vector<double> freq(5, 0.0);
  for (Index t = 5; t < 10005; ++t) freq[select_model(s, t, rng)] += 1.0;
  for (double f : freq) CHECK(std::abs(f / 10000.0 - 0.2) <= 0.02);
  CHECK(s.history.size() == 10005);

  auto sharp = with_means({0.5, 3.0, 3.5, 4.0, 6.0}, 1.0);
  std::vector<double> counts(5, 0.0);
  for (Index t = 5; t < 5005; ++t) counts[select_model(sharp, t, rng)] += 1.0;
  CHECK(std::max_element(counts.begin(), counts.end()) - counts.begin() == 0);
}

TEST_CASE("select_model retries arms that never produced a cost") {
  Rng rng(33);
  auto s = BanditState::create(3, 1.0);
  s = update(std::move(s), 0, 1.0);
  s = update(std::move(s), 2, 1.0);
  CHECK(select_model(s, 3, rng) == 1);
}

TEST_CASE("round cost for a single delivered node") {
  const auto m = build_ar1_model(4, 0.9);
  const std::vector<Index> z{0};
  const std::vector<double> zv{0.5};
  const std::vector<Index> d{2};
  const std::vector<double> dv{1.7};
  const auto cond = condition(m, z, zv);
  const Index l = *cond.local_of(2);
  const double expected = std::pow(1.7 - cond.cond_mean(l), 2) / cond.cond_cov(l, l);
  CHECK(*round_cost(m, z, zv, d, dv) == doctest::Approx(expected));
  CHECK(*round_cost(cond, d, dv) == doctest::Approx(expected));
  CHECK_FALSE(round_cost(cond, {}, {}).has_value());
  CHECK_THROWS_AS(round_cost(cond, z, zv), ContractViolation);
}

TEST_CASE("round cost refuses a model that predicts exactly") {
  const GaussianModel m{Vector::Zero(2), Matrix::Zero(2, 2)};
  const std::vector<Index> d{0};
  const std::vector<double> dv{1.0};
  CHECK_THROWS_AS(round_cost(unconditioned(m), d, dv), NumericalDegeneracy);
}

TEST_CASE("round cost averages to one under the true model and above one otherwise") {
  const auto fam = build_model_family(100, 3, 0.1);
  const double own = mean_round_cost(fam[0], fam[0], 10000, 34);
  CHECK(own == doctest::Approx(1.0).epsilon(0.05));
  const double wrong = mean_round_cost(fam[1], fam[0], 10000, 35);
  CHECK(wrong > 1.0);
  MESSAGE("mean cost of model 2 on model-1 data: " << wrong);
}
