#pragma once

// Gaussian signal models and conditional statistics.
//
// Node indices are 0-based throughout the library. A model describes the
// joint distribution x ~ N(mean, cov) of the K node measurements; a
// ConditionalState describes the unknown subvector u given the observed
// subvector z = x[known_idx].

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace das {

using Index = std::size_t;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Variances at or below this are treated as already determined.
inline constexpr double kVarianceFloor = 1e-10;

struct GaussianModel {
  Vector mean;
  Matrix cov;

  Index dim() const { return static_cast<Index>(mean.size()); }
};

// Checks dimensions, symmetry (1e-12 relative) and positive semidefiniteness
// (smallest eigenvalue >= -1e-10 * trace / K). Throws ValidationError.
void validate(const GaussianModel& model);
GaussianModel make_model(Vector mean, Matrix cov);

struct ConditionalState {
  std::vector<Index> known_idx;    // in the order observations arrived
  Vector known_vals;               // aligned with known_idx
  std::vector<Index> unknown_idx;  // ascending global indices
  Vector cond_mean;                // E[u | z], aligned with unknown_idx
  Matrix cond_cov;                 // Cov(u | z)

  Index unknown_count() const { return unknown_idx.size(); }
  double total_variance() const { return cond_cov.trace(); }
  // Position of a global node inside unknown_idx.
  std::optional<Index> local_of(Index node) const;
};

// The state with nothing observed: cond_mean == mean, cond_cov == cov.
ConditionalState unconditioned(const GaussianModel& model);

// Batch conditioning on x[idx] = vals. The complement comes back in ascending
// order. R_z is factorized by Cholesky; on failure the diagonal receives a
// jitter of 1e-10 * trace(R) / K and the factorization is retried once before
// NumericalDegeneracy is thrown, naming the node whose pivot collapsed.
ConditionalState condition(const GaussianModel& model, std::span<const Index> idx,
                           std::span<const double> vals);

// Conditions an existing state on one more observation u[local] = value via
// the Schur-complement update Cov' = Cov_{-l} - r r^T / nu. Throws
// NumericalDegeneracy when nu <= kVarianceFloor.
ConditionalState rank_one_condition(const ConditionalState& state, Index local, double value);

// Moves an unknown node into the known set at its conditional mean without
// touching the remaining statistics. Used for near-deterministic nodes.
ConditionalState drop_node(const ConditionalState& state, Index local);

// Covariance-only Schur elimination of row/column `local` from the n x n
// column-major matrix `cov`, writing the (n-1) x (n-1) result into `out`.
// Requires cov[local, local] > kVarianceFloor. `out` must not alias `cov`.
void schur_eliminate(std::span<const double> cov, Index n, Index local, std::span<double> out);

// mean_k = cos(pi k / 5) for 0-based k, cov[k, k'] = rho^|k - k'|.
GaussianModel build_ar1_model(Index K, double rho);

// Orthonormal DCT-II matrix, identical to MATLAB's dctmtx(K): row i is the
// i-th cosine basis function.
Matrix dct_matrix(Index K);

// The five-model family: model 0 is build_ar1_model(K, rho); models 1..4 use
// means sin, -cos, -sin, 0 and covariance
//   c (sum_{k=m-1}^{J+m-2} psi_k psi_k^T + noise I),  c = K / (J + noise K),
// with psi_k the k-th (1-based) column of dct_matrix(K) and m the 1-based
// model number. Returns the first `M` models, 1 <= M <= 5.
std::vector<GaussianModel> build_model_family(Index K, Index J, double noise, Index M = 5,
                                              double rho = 0.95);

// Lower-triangular factor L with L L^T = cov (+ jitter if needed), for drawing
// realizations x = mean + L w.
Matrix sampling_factor(const GaussianModel& model);

}  // namespace das
