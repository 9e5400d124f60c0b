#include "das/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "das/error.hpp"

namespace das {

BanditState BanditState::create(Index M, double tau) {
  if (M < 1) throw ValidationError("bandit needs at least one arm");
  if (!(tau > 0.0)) throw ValidationError("softmax temperature must be positive");
  BanditState s;
  s.cost_sum.assign(M, 0.0);
  s.count.assign(M, 0);
  s.tau = tau;
  return s;
}

std::optional<double> BanditState::psi(Index m) const {
  if (m >= arms() || count[m] == 0) return std::nullopt;
  return cost_sum[m] / static_cast<double>(count[m]);
}

std::optional<double> round_cost(const ConditionalState& cond, std::span<const Index> delivered_idx,
                                 std::span<const double> delivered_vals) {
  if (delivered_idx.size() != delivered_vals.size())
    throw ContractViolation("round_cost: index and value counts differ");
  if (delivered_idx.empty()) return std::nullopt;
  double err = 0.0;
  double expected = 0.0;
  for (std::size_t i = 0; i < delivered_idx.size(); ++i) {
    const auto local = cond.local_of(delivered_idx[i]);
    if (!local)
      throw ContractViolation("round_cost: node " + std::to_string(delivered_idx[i]) +
                              " is already known");
    const double d = delivered_vals[i] - cond.cond_mean(*local);
    err += d * d;
    expected += cond.cond_cov(*local, *local);
  }
  if (expected < 1e-12)
    throw NumericalDegeneracy("round_cost: model predicts the delivered values exactly",
                              delivered_idx.front());
  return err / expected;
}

std::optional<double> round_cost(const GaussianModel& model, std::span<const Index> z_idx,
                                 std::span<const double> z_vals,
                                 std::span<const Index> delivered_idx,
                                 std::span<const double> delivered_vals) {
  if (delivered_idx.empty()) return std::nullopt;
  return round_cost(condition(model, z_idx, z_vals), delivered_idx, delivered_vals);
}

std::vector<double> softmax_probs(const BanditState& state) {
  const Index M = state.arms();
  std::vector<double> logits(M);
  for (Index m = 0; m < M; ++m) {
    const auto p = state.psi(m);
    if (!p) throw ContractViolation("softmax_probs: arm " + std::to_string(m) + " has no samples");
    logits[m] = -*p / state.tau;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

Index select_model(BanditState& state, Index t, Rng& rng) {
  const Index M = state.arms();
  Index m = 0;
  const auto unsampled = std::find(state.count.begin(), state.count.end(), Index{0});
  if (t < M) {
    m = t;
  } else if (unsampled != state.count.end()) {
    // An arm whose exploration rounds delivered nothing is retried first.
    m = static_cast<Index>(unsampled - state.count.begin());
  } else {
    const auto probs = softmax_probs(state);
    std::discrete_distribution<Index> pick(probs.begin(), probs.end());
    m = pick(rng);
  }
  state.history.push_back(m);
  return m;
}

BanditState update(BanditState state, Index m, double cost) {
  if (m >= state.arms()) throw ContractViolation("update: arm out of range");
  if (!(cost >= 0.0)) throw ContractViolation("update: cost must be nonnegative");
  state.cost_sum[m] += cost;
  ++state.count[m];
  return state;
}

}  // namespace das
