#pragma once

// Scenario configuration. Files are flat `key = value` text with `#`
// comments; keys mirror the Scenario fields below.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "das/access.hpp"
#include "das/engine.hpp"

namespace das {

enum class Mode { polling, aloha, bandit };
enum class FirstRound { random, greedy };

struct QPolicy {
  // nullopt: min(remaining, round(N / p)) for ALOHA, min(remaining, N) for polling.
  std::optional<Index> fixed;
};

struct Scenario {
  Mode mode = Mode::aloha;
  AccessMode bandit_access = AccessMode::aloha;  // access scheme in bandit mode

  Index K = 100;
  double rho = 0.95;
  Index N = 4;

  // Either a uniform p, or the fading parameterization (scalars applied to
  // every node, or K-long lists).
  std::optional<double> p = 0.2;
  std::optional<double> threshold_snr;
  std::vector<double> mean_snr;
  std::vector<double> availability;

  QPolicy q_policy;
  SelectionRule selection = SelectionRule::greedy;
  FirstRound first_round = FirstRound::random;

  std::optional<Index> target_known;  // K-bar; defaults to K
  Index max_rounds = 120;             // T
  Index runs = 100;
  std::uint64_t seed = 1;
  Index threads = 0;                  // 0: hardware concurrency

  // Bandit / model family.
  double tau = 1.0;
  Index M = 5;
  Index J = 3;
  double noise = 0.1;
  Index true_model = 1;      // 1-based
  Index baseline_model = 2;  // 1-based wrong model for the mismatch baseline

  // Keys assigned through apply_setting, so callers can tell defaults apart.
  std::set<std::string> explicit_keys;

  Index stop_threshold() const { return target_known.value_or(K); }
  ChannelConfig channel_config() const;  // uses mode (or bandit_access)
  AccessMode access_mode() const;

  // Throws ValidationError describing the first problem found.
  void validate() const;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);
// Applies one `key = value` assignment; throws ValidationError on unknown keys
// or malformed values.
void apply_setting(Scenario& s, const std::string& key, const std::string& value);

std::string to_string(Mode mode);
std::string to_string(AccessMode mode);

}  // namespace das
