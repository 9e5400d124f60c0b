#include <doctest.h>

#include <sstream>

#include "das/error.hpp"
#include "das/scenario.hpp"

using namespace das;

TEST_CASE("defaults describe the reference setting") {
  const Scenario s;
  CHECK(s.K == 100);
  CHECK(s.N == 4);
  CHECK(*s.p == 0.2);
  CHECK(s.rho == 0.95);
  CHECK(s.stop_threshold() == 100);
  CHECK(s.first_round == FirstRound::random);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("parse a flat key/value file") {
  std::istringstream in(R"(# comment line
mode = polling
K = 40        # trailing comment
N=2
p = 0.35
q_policy = fixed:6
selection = topq
first_round = greedy
target_known = 30
T = 75
runs = 12
seed = 18446744073709551615
)");
  const Scenario s = parse_scenario(in);
  CHECK(s.mode == Mode::polling);
  CHECK(s.K == 40);
  CHECK(s.N == 2);
  CHECK(*s.p == doctest::Approx(0.35));
  CHECK(*s.q_policy.fixed == 6);
  CHECK(s.selection == SelectionRule::top_q);
  CHECK(s.first_round == FirstRound::greedy);
  CHECK(s.stop_threshold() == 30);
  CHECK(s.max_rounds == 75);
  CHECK(s.runs == 12);
  CHECK(s.seed == 18446744073709551615ULL);
  CHECK(s.explicit_keys.contains("max_rounds"));
  CHECK_FALSE(s.explicit_keys.contains("tau"));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("malformed configs are rejected") {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_scenario(in);
  };
  CHECK_THROWS_AS(parse("bogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("K 100\n"), ValidationError);
  CHECK_THROWS_AS(parse("K = -3\n"), ValidationError);
  CHECK_THROWS_AS(parse("p = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse("mode = tdma\n"), ValidationError);
  CHECK_THROWS_AS(parse("q_policy = half\n"), ValidationError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.cfg"), ValidationError);
}

TEST_CASE("validation catches inconsistent scenarios") {
  Scenario s;
  s.target_known = 101;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = Scenario{};
  s.p = 0.0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = Scenario{};
  s.mode = Mode::bandit;
  s.M = 1;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.M = 5;
  s.K = 6;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = Scenario{};
  s.runs = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("fading parameterization") {
  std::istringstream in("K = 3\nthreshold_snr = 1.0\nmean_snr = 1.0, 2.0, 4.0\navailability = 0.5\n");
  const Scenario s = parse_scenario(in);
  const auto cfg = s.channel_config();
  REQUIRE(cfg.upload_prob.size() == 3);
  CHECK(cfg.upload_prob[0] == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(cfg.upload_prob[2] == doctest::Approx(0.5 * std::exp(-0.25)));

  std::istringstream bad("K = 3\nthreshold_snr = 1.0\nmean_snr = 1.0, 2.0\n");
  CHECK_THROWS_AS(parse_scenario(bad).validate(), ValidationError);
}
