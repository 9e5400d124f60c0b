#pragma once

// Softmax multi-armed bandit over candidate Gaussian models. Each arm is a
// model; the cost of an arm in a round is the squared prediction error of the
// delivered measurements normalized by its expectation under that arm.

#include <optional>
#include <span>
#include <vector>

#include "das/gaussian.hpp"
#include "das/rng.hpp"

namespace das {

struct BanditState {
  std::vector<double> cost_sum;
  std::vector<Index> count;
  double tau = 1.0;
  std::vector<Index> history;  // m(0), m(1), ...

  static BanditState create(Index M, double tau);
  Index arms() const { return cost_sum.size(); }
  // Sample mean of the arm's costs; nullopt before its first sample.
  std::optional<double> psi(Index m) const;
};

// ||x_D - E_m[x_D | z]||^2 / Tr(Cov_m(x_D | z)) with `cond` holding model m's
// statistics given z. Returns nullopt for an empty delivered set. Throws
// NumericalDegeneracy when the denominator is below 1e-12, and
// ContractViolation when a delivered node is not unknown in `cond`.
std::optional<double> round_cost(const ConditionalState& cond, std::span<const Index> delivered_idx,
                                 std::span<const double> delivered_vals);

// Same, conditioning `model` on (z_idx, z_vals) first.
std::optional<double> round_cost(const GaussianModel& model, std::span<const Index> z_idx,
                                 std::span<const double> z_vals,
                                 std::span<const Index> delivered_idx,
                                 std::span<const double> delivered_vals);

// P_m proportional to exp(-psi_m / tau), max-shifted. Requires every count >= 1.
std::vector<double> softmax_probs(const BanditState& state);

// Round-robin for t < M, softmax sampling afterwards. An arm still without a
// cost sample at t >= M is chosen before sampling. Appends to history.
Index select_model(BanditState& state, Index t, Rng& rng);

BanditState update(BanditState state, Index m, double cost);

}  // namespace das
