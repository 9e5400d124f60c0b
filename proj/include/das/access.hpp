#pragma once

// Medium access over fading channels: uploading probability, sequential
// polling on dedicated channels, and multichannel slotted ALOHA.

#include <cstddef>
#include <span>
#include <vector>

#include "das/gaussian.hpp"
#include "das/rng.hpp"

namespace das {

enum class AccessMode { polling, aloha };

// p_k = exp(-threshold_snr / mean_snr) * availability
double uploading_probability(double threshold_snr, double mean_snr, double availability);

struct ChannelConfig {
  Index channels = 1;
  AccessMode mode = AccessMode::polling;
  std::vector<double> upload_prob;  // per node

  static ChannelConfig uniform(Index channels, AccessMode mode, Index K, double p);
  // One (mean_snr, availability) pair per node, shared threshold.
  static ChannelConfig from_fading(Index channels, AccessMode mode, double threshold_snr,
                                   std::span<const double> mean_snr,
                                   std::span<const double> availability);
  double mean_probability() const;
  void validate() const;
};

struct RoundOutcome {
  std::vector<Index> requested;
  std::vector<Index> responders;
  std::vector<Index> channel_choice;  // 0-based channel per responder (aloha only)
  std::vector<Index> delivered;
  std::vector<Index> collisions;      // channels with two or more responders
};

// Each requested node gets a dedicated channel and delivers with its own
// probability. Throws ContractViolation when more nodes than channels are
// requested.
RoundOutcome polling_round(std::span<const Index> requested, Index channels,
                           std::span<const double> upload_prob, Rng& rng);

// Each requested node responds with its probability and picks a channel
// uniformly; only sole occupants of a channel are delivered.
RoundOutcome aloha_round(std::span<const Index> requested, Index channels,
                         std::span<const double> upload_prob, Rng& rng);

// Polling: N p (requests capped at N). ALOHA: Q p (1 - p/N)^(Q-1).
double expected_successes(AccessMode mode, Index channels, double p, Index Q);

// round(N / p), capped by `remaining`, at least 1.
Index optimal_q(Index channels, double p, Index remaining);

enum class RoundsBound { polling, aloha_exact, aloha_approx };

// Mean number of rounds to collect `target` measurements:
// polling K/(N p), exact ALOHA K/(Q p (1-p/N)^(Q-1)), approximate K/(N/e).
double mean_rounds_bound(RoundsBound scheme, double target, Index channels, double p, Index Q);

// True iff optimized ALOHA delivers more per round than polling, i.e. p < 1/e.
bool crossover_check(double p);

// Draw of |h|^2 for a CSCG channel coefficient with E|h|^2 = mean_gain.
double sample_fading_gain(double mean_gain, Rng& rng);

// One explicit upload event: the node has a measurement (prob. availability)
// and gain * mean_snr clears threshold_snr for a unit-mean Rayleigh gain.
bool fading_upload_event(double threshold_snr, double mean_snr, double availability, Rng& rng);

}  // namespace das
