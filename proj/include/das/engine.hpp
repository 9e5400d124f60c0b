#pragma once

// Data-aided sensing round logic: selection costs, greedy node selection,
// ingestion of delivered measurements and MSE bookkeeping.

#include <span>
#include <utility>
#include <vector>

#include "das/gaussian.hpp"

namespace das {

struct SensingState {
  Index round = 0;
  std::vector<Index> acc_idx;  // A(t-1), in delivery order
  ConditionalState cond;
  Vector target;               // ground-truth realization; never read by selection
  double mse_theory = 0.0;     // Tr(Cov(u | z))
  double sqerr_actual = 0.0;   // ||u - E[u | z]||^2
};

SensingState start_session(const GaussianModel& model, Vector target);

struct SelectionCost {
  Index node = 0;       // global index
  double cost = 0.0;    // C_l = beta - r_norm2 / nu
  double beta = 0.0;    // Tr(Cov(u_{-l} | z))
  double nu = 0.0;      // Var(u_l | z)
  double r_norm2 = 0.0; // ||Cov(u_{-l}, u_l | z)||^2
};

// One entry per unknown node, in ascending node order. Nodes whose variance is
// at or below kVarianceFloor get r_norm2 / nu treated as zero.
std::vector<SelectionCost> selection_costs(const ConditionalState& cond);
inline std::vector<SelectionCost> selection_costs(const SensingState& state) {
  return selection_costs(state.cond);
}

enum class SelectionRule {
  greedy,  // sequential hypothetical conditioning
  top_q,   // the Q smallest single-node costs, for comparison
};

// Picks min(Q, #unknown) nodes. Ties go to the lowest global index.
std::vector<Index> select_nodes(const ConditionalState& cond, Index Q,
                                SelectionRule rule = SelectionRule::greedy);
inline std::vector<Index> select_nodes(const SensingState& state, Index Q,
                                       SelectionRule rule = SelectionRule::greedy) {
  return select_nodes(state.cond, Q, rule);
}

using Delivery = std::pair<Index, double>;  // (global node, measured value)

// Conditions the state on each delivery in order and advances the round.
// Throws ContractViolation for a node that is already known.
SensingState ingest(const SensingState& state, std::span<const Delivery> delivered);

// Ingest deliveries whose values come from state.target.
SensingState ingest_nodes(const SensingState& state, std::span<const Index> nodes);

// Order in which nodes would be polled one at a time when every request
// succeeds. Depends on the covariance only.
std::vector<Index> polling_order(const GaussianModel& model);

}  // namespace das
