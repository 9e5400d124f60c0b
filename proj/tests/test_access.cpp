#include <doctest.h>

#include <cmath>
#include <set>

#include "das/access.hpp"
#include "das/error.hpp"

using namespace das;

namespace {

std::vector<Index> first_nodes(Index n) {
  std::vector<Index> v(n);
  for (Index i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("uploading probability") {
  CHECK(uploading_probability(2.0, 2.0, 1.0) == doctest::Approx(0.36788).epsilon(1e-5));
  CHECK(uploading_probability(3.0, 1.5, 0.0) == 0.0);
  CHECK(uploading_probability(0.0, 1.5, 0.7) == doctest::Approx(0.7));
  CHECK_THROWS_AS(uploading_probability(1.0, 0.0, 0.5), ValidationError);
  CHECK_THROWS_AS(uploading_probability(1.0, 1.0, 1.5), ValidationError);
}

TEST_CASE("channel config from fading parameters") {
  const std::vector<double> snr{1.0, 2.0}, avail{1.0, 0.5};
  const auto cfg = ChannelConfig::from_fading(3, AccessMode::aloha, 1.0, snr, avail);
  CHECK(cfg.upload_prob[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(cfg.upload_prob[1] == doctest::Approx(0.5 * std::exp(-0.5)));
  CHECK_THROWS_AS(ChannelConfig::uniform(0, AccessMode::polling, 3, 0.2), ValidationError);
  CHECK_THROWS_AS(ChannelConfig::uniform(2, AccessMode::polling, 3, 1.2), ValidationError);
}

TEST_CASE("Rayleigh outage matches the closed-form uploading probability") {
  Rng rng(3);
  const double threshold = 1.3, mean_snr = 2.0, avail = 0.8;
  const int trials = 200000;
  int hits = 0;
  for (int i = 0; i < trials; ++i) hits += fading_upload_event(threshold, mean_snr, avail, rng) ? 1 : 0;
  const double p = uploading_probability(threshold, mean_snr, avail);
  const double se = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(hits / static_cast<double>(trials) - p) <= 4 * se);

  double mean_gain = 0.0;
  for (int i = 0; i < 100000; ++i) mean_gain += sample_fading_gain(2.5, rng);
  CHECK(mean_gain / 100000 == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("polling round") {
  Rng rng(1);
  const auto req = first_nodes(4);
  const std::vector<double> ones(4, 1.0), zeros(4, 0.0);
  const auto all = polling_round(req, 4, ones, rng);
  CHECK(all.delivered == req);
  CHECK(all.collisions.empty());
  CHECK(polling_round(req, 4, zeros, rng).delivered.empty());
  CHECK_THROWS_AS(polling_round(first_nodes(5), 4, std::vector<double>(5, 1.0), rng), ContractViolation);
}

TEST_CASE("polling throughput is N p") {
  Rng rng(2);
  const auto req = first_nodes(4);
  const std::vector<double> p(4, 0.2);
  double total = 0.0;
  const int rounds = 100000;
  for (int i = 0; i < rounds; ++i) total += static_cast<double>(polling_round(req, 4, p, rng).delivered.size());
  CHECK(total / rounds == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("ALOHA collisions") {
  Rng rng(4);
  const std::vector<double> ones(2, 1.0);
  const auto both = aloha_round(first_nodes(2), 1, ones, rng);
  CHECK(both.responders.size() == 2);
  CHECK(both.delivered.empty());
  CHECK(both.collisions == std::vector<Index>{0});

  for (Index n : {1, 3, 16}) {
    const auto single = aloha_round(std::vector<Index>{7}, n, std::vector<double>(8, 1.0), rng);
    CHECK(single.delivered == std::vector<Index>{7});
    CHECK(single.channel_choice.front() < n);
  }
}

TEST_CASE("ALOHA outcome invariants") {
  Rng rng(5);
  const auto req = first_nodes(20);
  const std::vector<double> p(20, 0.6);
  for (int i = 0; i < 2000; ++i) {
    const auto out = aloha_round(req, 4, p, rng);
    const std::set<Index> responders(out.responders.begin(), out.responders.end());
    const std::set<Index> delivered(out.delivered.begin(), out.delivered.end());
    CHECK(delivered.size() == out.delivered.size());
    for (Index d : out.delivered) CHECK(responders.count(d) == 1);
    CHECK(out.channel_choice.size() == out.responders.size());
    for (std::size_t k = 0; k < out.responders.size(); ++k) {
      const auto same = std::count(out.channel_choice.begin(), out.channel_choice.end(), out.channel_choice[k]);
      CHECK((delivered.count(out.responders[k]) == 1) == (same == 1));
    }
  }
}

TEST_CASE("ALOHA throughput at Q = 20, N = 4, p = 0.2") {
  Rng rng(6);
  const auto req = first_nodes(20);
  const std::vector<double> p(20, 0.2);
  double total = 0.0;
  const int rounds = 100000;
  for (int i = 0; i < rounds; ++i) total += static_cast<double>(aloha_round(req, 4, p, rng).delivered.size());
  const double expect = 20 * 0.2 * std::pow(0.95, 19);
  CHECK(expect == doctest::Approx(1.50941).epsilon(1e-5));
  CHECK(total / rounds == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("property: ALOHA mean within 3 standard errors over a parameter grid") {
  Rng rng(8);
  const int rounds = 100000;
  for (Index Q : {1, 5, 20})
    for (Index N : {1, 4, 16})
      for (double p : {0.1, 0.2, 0.5}) {
        CAPTURE(Q);
        CAPTURE(N);
        CAPTURE(p);
        const auto req = first_nodes(Q);
        const std::vector<double> probs(Q, p);
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < rounds; ++i) {
          const double d = static_cast<double>(aloha_round(req, N, probs, rng).delivered.size());
          sum += d;
          sum2 += d * d;
        }
        const double mean = sum / rounds;
        const double se = std::sqrt((sum2 / rounds - mean * mean) / rounds);
        CHECK(std::abs(mean - expected_successes(AccessMode::aloha, N, p, Q)) <= 3.0 * se + 1e-12);
      }
}

TEST_CASE("expected successes") {
  CHECK(expected_successes(AccessMode::aloha, 4, 0.2, 1) == doctest::Approx(0.2));
  CHECK(expected_successes(AccessMode::polling, 4, 0.2, 4) == doctest::Approx(0.8));
  CHECK(expected_successes(AccessMode::polling, 4, 0.2, 40) == doctest::Approx(0.8));
  // Q = N / p with many channels approaches N / e.
  const double big = expected_successes(AccessMode::aloha, 4000, 0.2, 20000);
  CHECK(big / 4000.0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
  CHECK(4.0 * std::exp(-1.0) == doctest::Approx(1.4715).epsilon(1e-4));
}

TEST_CASE("property: ALOHA throughput peaks within one of N / p") {
  for (Index N : {1, 2, 4, 8, 16})
    for (double p : {0.1, 0.2, 0.3, 0.5, 0.9}) {
      const double q = N / p;
      Index best = 1;
      for (Index Q = 1; Q <= static_cast<Index>(3 * q) + 1; ++Q)
        if (expected_successes(AccessMode::aloha, N, p, Q) > expected_successes(AccessMode::aloha, N, p, best))
          best = Q;
      CAPTURE(N);
      CAPTURE(p);
      CHECK(std::abs(static_cast<double>(best) - q) <= 1.0);
      // Continuous maximizer of Q a^(Q-1) is -1 / ln a.
      const double exact = -1.0 / std::log1p(-p / N);
      CHECK(std::abs(static_cast<double>(best) - exact) < 1.0);
      const double at_rule = expected_successes(AccessMode::aloha, N, p, optimal_q(N, p, 1000));
      CHECK(at_rule >= 0.99 * expected_successes(AccessMode::aloha, N, p, best));
    }
}

TEST_CASE("optimal Q") {
  CHECK(optimal_q(4, 0.2, 100) == 20);
  CHECK(optimal_q(4, 0.2, 3) == 3);
  CHECK(optimal_q(4, 1.0, 100) == 4);
  CHECK(optimal_q(4, 0.3, 100) == 13);
  CHECK(optimal_q(4, 0.2, 0) == 1);
  CHECK_THROWS_AS(optimal_q(4, 0.0, 10), ContractViolation);
}

TEST_CASE("mean rounds bounds") {
  CHECK(mean_rounds_bound(RoundsBound::polling, 75, 4, 0.2, 20) == doctest::Approx(93.75));
  CHECK(mean_rounds_bound(RoundsBound::aloha_approx, 75, 4, 0.2, 20) == doctest::Approx(50.96).epsilon(2e-4));
  CHECK(mean_rounds_bound(RoundsBound::aloha_exact, 75, 4, 0.2, 20) == doctest::Approx(49.688).epsilon(1e-4));
  CHECK(mean_rounds_bound(RoundsBound::aloha_exact, 0, 4, 0.2, 20) == 0.0);
}

TEST_CASE("crossover at 1/e") {
  CHECK(crossover_check(0.2));
  CHECK_FALSE(crossover_check(0.5));
  CHECK_FALSE(crossover_check(std::exp(-1.0)));
  CHECK(crossover_check(std::nextafter(std::exp(-1.0), 0.0)));
}
