#include "das/engine.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "das/error.hpp"
#include "das/kernels.hpp"

namespace das {
namespace {

double tie_tolerance(double total_variance) {
  return 1e-12 * std::max(total_variance, std::numeric_limits<double>::min());
}

// Cost of every column of an n x n column-major covariance. Uses
// C_l = Tr - ||col_l||^2 / nu_l, which equals beta_l - ||r_l||^2 / nu_l.
void column_costs(const double* cov, Index n, double trace, std::vector<double>& out) {
  out.resize(n);
  const auto& k = kernels::active();
  for (Index l = 0; l < n; ++l) {
    const double* col = cov + l * n;
    const double nu = col[l];
    if (nu > kVarianceFloor) {
      out[l] = std::max(0.0, trace - k.sum_squares(col, n) / nu);
    } else {
      out[l] = std::max(0.0, trace - nu);
    }
  }
}

Index argmin_lowest(const std::vector<double>& costs, double tol) {
  Index best = 0;
  for (Index l = 1; l < costs.size(); ++l)
    if (costs[l] < costs[best] - tol) best = l;
  return best;
}

// Removes row/column `local` without any update.
void compact(const double* cov, Index n, Index local, double* out) {
  const Index m = n - 1;
  for (Index j = 0, jd = 0; j < n; ++j) {
    if (j == local) continue;
    const double* src = cov + j * n;
    double* dst = out + jd * m;
    std::copy(src, src + local, dst);
    std::copy(src + local + 1, src + n, dst + local);
    ++jd;
  }
}

double trace_of(const double* cov, Index n) {
  double t = 0.0;
  for (Index i = 0; i < n; ++i) t += cov[i * n + i];
  return t;
}

}  // namespace

SensingState start_session(const GaussianModel& model, Vector target) {
  if (target.size() != static_cast<Eigen::Index>(model.dim()))
    throw ContractViolation("start_session: target length does not match model");
  SensingState s;
  s.cond = unconditioned(model);
  s.target = std::move(target);
  s.mse_theory = s.cond.total_variance();
  s.sqerr_actual = kernels::squared_distance({s.target.data(), model.dim()},
                                             {s.cond.cond_mean.data(), model.dim()});
  return s;
}

std::vector<SelectionCost> selection_costs(const ConditionalState& cond) {
  const Index n = cond.unknown_count();
  std::vector<SelectionCost> out;
  out.reserve(n);
  const double trace = cond.total_variance();
  const auto& k = kernels::active();
  for (Index l = 0; l < n; ++l) {
    const double* col = cond.cond_cov.data() + l * n;
    SelectionCost c;
    c.node = cond.unknown_idx[l];
    c.nu = col[l];
    c.beta = trace - c.nu;
    c.r_norm2 = std::max(0.0, k.sum_squares(col, n) - c.nu * c.nu);
    const double reduction = c.nu > kVarianceFloor ? c.r_norm2 / c.nu : 0.0;
    c.cost = std::max(0.0, c.beta - reduction);
    out.push_back(c);
  }
  return out;
}

std::vector<Index> select_nodes(const ConditionalState& cond, Index Q, SelectionRule rule) {
  if (Q == 0) throw ContractViolation("select_nodes: Q must be at least 1");
  Index n = cond.unknown_count();
  const Index picks = std::min(Q, n);
  std::vector<Index> chosen;
  if (picks == 0) return chosen;
  chosen.reserve(picks);

  if (rule == SelectionRule::top_q) {
    auto costs = selection_costs(cond);
    std::stable_sort(costs.begin(), costs.end(), [](const SelectionCost& a, const SelectionCost& b) {
      return a.cost < b.cost;
    });
    for (Index i = 0; i < picks; ++i) chosen.push_back(costs[i].node);
    return chosen;
  }

  std::vector<Index> nodes = cond.unknown_idx;
  std::vector<double> work(cond.cond_cov.data(), cond.cond_cov.data() + n * n);
  std::vector<double> next(n * n);
  std::vector<double> costs;
  for (Index step = 0; step < picks; ++step) {
    const double trace = trace_of(work.data(), n);
    column_costs(work.data(), n, trace, costs);
    const Index l = argmin_lowest(costs, tie_tolerance(trace));
    chosen.push_back(nodes[l]);
    if (step + 1 == picks) break;
    if (work[l * n + l] > kVarianceFloor) {
      schur_eliminate({work.data(), n * n}, n, l, {next.data(), (n - 1) * (n - 1)});
    } else {
      compact(work.data(), n, l, next.data());
    }
    std::swap(work, next);
    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(l));
    --n;
  }
  return chosen;
}

SensingState ingest(const SensingState& state, std::span<const Delivery> delivered) {
  SensingState s = state;
  for (const auto& [node, value] : delivered) {
    const auto local = s.cond.local_of(node);
    if (!local)
      throw ContractViolation("ingest: node " + std::to_string(node) + " is already known");
    if (s.cond.cond_cov(*local, *local) > kVarianceFloor) {
      s.cond = rank_one_condition(s.cond, *local, value);
    } else {
      s.cond = drop_node(s.cond, *local);
    }
    s.acc_idx.push_back(node);
  }
  ++s.round;
  if (!delivered.empty()) {
    s.mse_theory = s.cond.total_variance();
    const Index n = s.cond.unknown_count();
    Vector u(static_cast<Eigen::Index>(n));
    for (Index i = 0; i < n; ++i) u(i) = s.target(s.cond.unknown_idx[i]);
    s.sqerr_actual = kernels::squared_distance({u.data(), n}, {s.cond.cond_mean.data(), n});
  }
  return s;
}

SensingState ingest_nodes(const SensingState& state, std::span<const Index> nodes) {
  std::vector<Delivery> d;
  d.reserve(nodes.size());
  for (Index node : nodes) {
    if (node >= static_cast<Index>(state.target.size()))
      throw ContractViolation("ingest: node " + std::to_string(node) + " out of range");
    d.emplace_back(node, state.target(node));
  }
  return ingest(state, d);
}

std::vector<Index> polling_order(const GaussianModel& model) {
  return select_nodes(unconditioned(model), std::max<Index>(model.dim(), 1));
}

}  // namespace das
