#include "das/access.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "das/error.hpp"

namespace das {
namespace {

bool draw(double p, Rng& rng) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

double prob_of(std::span<const double> upload_prob, Index node) {
  if (node >= upload_prob.size())
    throw ContractViolation("no uploading probability for node " + std::to_string(node));
  return upload_prob[node];
}

}  // namespace

double uploading_probability(double threshold_snr, double mean_snr, double availability) {
  if (threshold_snr < 0.0 || !(mean_snr > 0.0) || availability < 0.0 || availability > 1.0)
    throw ValidationError("uploading_probability: parameters out of range");
  return std::exp(-threshold_snr / mean_snr) * availability;
}

ChannelConfig ChannelConfig::uniform(Index channels, AccessMode mode, Index K, double p) {
  ChannelConfig c{channels, mode, std::vector<double>(K, p)};
  c.validate();
  return c;
}

ChannelConfig ChannelConfig::from_fading(Index channels, AccessMode mode, double threshold_snr,
                                         std::span<const double> mean_snr,
                                         std::span<const double> availability) {
  if (mean_snr.size() != availability.size())
    throw ValidationError("per-node SNR and availability lists differ in length");
  if (!(threshold_snr > 0.0)) throw ValidationError("threshold SNR must be positive");
  ChannelConfig c{channels, mode, {}};
  c.upload_prob.reserve(mean_snr.size());
  for (Index k = 0; k < mean_snr.size(); ++k)
    c.upload_prob.push_back(uploading_probability(threshold_snr, mean_snr[k], availability[k]));
  c.validate();
  return c;
}

double ChannelConfig::mean_probability() const {
  if (upload_prob.empty()) return 0.0;
  return std::accumulate(upload_prob.begin(), upload_prob.end(), 0.0) /
         static_cast<double>(upload_prob.size());
}

void ChannelConfig::validate() const {
  if (channels < 1) throw ValidationError("at least one channel is required");
  for (double p : upload_prob)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("uploading probability outside [0, 1]");
}

RoundOutcome polling_round(std::span<const Index> requested, Index channels,
                           std::span<const double> upload_prob, Rng& rng) {
  if (requested.size() > channels)
    throw ContractViolation("polling_round: " + std::to_string(requested.size()) +
                            " requests exceed " + std::to_string(channels) + " channels");
  RoundOutcome out;
  out.requested.assign(requested.begin(), requested.end());
  for (Index node : requested)
    if (draw(prob_of(upload_prob, node), rng)) out.responders.push_back(node);
  out.delivered = out.responders;
  return out;
}

RoundOutcome aloha_round(std::span<const Index> requested, Index channels,
                         std::span<const double> upload_prob, Rng& rng) {
  if (channels < 1) throw ContractViolation("aloha_round: at least one channel is required");
  RoundOutcome out;
  out.requested.assign(requested.begin(), requested.end());
  for (Index node : requested)
    if (draw(prob_of(upload_prob, node), rng)) out.responders.push_back(node);

  std::uniform_int_distribution<Index> pick(0, channels - 1);
  std::vector<Index> load(channels, 0);
  out.channel_choice.reserve(out.responders.size());
  for (std::size_t i = 0; i < out.responders.size(); ++i) {
    const Index ch = pick(rng);
    out.channel_choice.push_back(ch);
    ++load[ch];
  }
  for (std::size_t i = 0; i < out.responders.size(); ++i)
    if (load[out.channel_choice[i]] == 1) out.delivered.push_back(out.responders[i]);
  for (Index ch = 0; ch < channels; ++ch)
    if (load[ch] >= 2) out.collisions.push_back(ch);
  return out;
}

double expected_successes(AccessMode mode, Index channels, double p, Index Q) {
  const double n = static_cast<double>(channels);
  if (mode == AccessMode::polling) return static_cast<double>(std::min(Q, channels)) * p;
  if (Q == 0) return 0.0;
  return static_cast<double>(Q) * p * std::pow(1.0 - p / n, static_cast<double>(Q - 1));
}

Index optimal_q(Index channels, double p, Index remaining) {
  if (!(p > 0.0)) throw ContractViolation("optimal_q: p must be positive");
  const double q = std::round(static_cast<double>(channels) / p);
  const Index rounded = q < 1.0 ? 1 : static_cast<Index>(q);
  return std::max<Index>(1, std::min(rounded, remaining));
}

double mean_rounds_bound(RoundsBound scheme, double target, Index channels, double p, Index Q) {
  if (target < 0.0) throw ContractViolation("mean_rounds_bound: negative target");
  if (target == 0.0) return 0.0;
  const double n = static_cast<double>(channels);
  switch (scheme) {
    case RoundsBound::polling: return target / (n * p);
    case RoundsBound::aloha_exact: return target / expected_successes(AccessMode::aloha, channels, p, Q);
    case RoundsBound::aloha_approx: return target / (n * std::exp(-1.0));
  }
  return 0.0;
}

bool crossover_check(double p) { return p < std::exp(-1.0); }

double sample_fading_gain(double mean_gain, Rng& rng) {
  // h = sqrt(mean_gain / 2) (a + j b) with a, b standard normal.
  std::normal_distribution<double> g(0.0, 1.0);
  const double a = g(rng);
  const double b = g(rng);
  return 0.5 * mean_gain * (a * a + b * b);
}

bool fading_upload_event(double threshold_snr, double mean_snr, double availability, Rng& rng) {
  const bool available = draw(availability, rng);
  const double snr = sample_fading_gain(1.0, rng) * mean_snr;
  return available && snr >= threshold_snr;
}

}  // namespace das
