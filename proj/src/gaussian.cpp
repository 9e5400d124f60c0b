#include "das/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "das/error.hpp"
#include "das/kernels.hpp"

namespace das {
namespace {

// In-place lower Cholesky. Returns the first pivot position that is not
// strictly positive, or nullopt on success.
std::optional<Index> cholesky_in_place(Matrix& a) {
  const Index n = static_cast<Index>(a.rows());
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return j;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  a.triangularView<Eigen::StrictlyUpper>().setZero();
  return std::nullopt;
}

// Factorizes `block`, retrying once with diagonal jitter. `labels` maps block
// positions to global node indices for the error message.
Matrix factorize(const Matrix& block, double jitter, std::span<const Index> labels) {
  Matrix l = block;
  auto bad = cholesky_in_place(l);
  if (!bad) return l;
  l = block;
  l.diagonal().array() += jitter;
  bad = cholesky_in_place(l);
  if (!bad) return l;
  const Index node = labels.empty() ? *bad : labels[*bad];
  throw NumericalDegeneracy("covariance of observed nodes is singular at node " +
                                std::to_string(node),
                            node);
}

double jitter_for(const Matrix& cov) {
  const double k = static_cast<double>(std::max<Eigen::Index>(cov.rows(), 1));
  return 1e-10 * std::max(cov.trace(), 0.0) / k;
}

}  // namespace

void validate(const GaussianModel& model) {
  const Eigen::Index k = model.mean.size();
  if (k == 0) throw ValidationError("model has no nodes");
  if (model.cov.rows() != k || model.cov.cols() != k)
    throw ValidationError("covariance must be " + std::to_string(k) + "x" + std::to_string(k));
  if (!model.cov.allFinite() || !model.mean.allFinite())
    throw ValidationError("model contains non-finite entries");
  const double scale = std::max(1.0, model.cov.cwiseAbs().maxCoeff());
  if ((model.cov - model.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("covariance is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(model.cov, Eigen::EigenvaluesOnly);
  const double floor = -1e-10 * model.cov.trace() / static_cast<double>(k);
  if (eig.eigenvalues().minCoeff() < floor)
    throw ValidationError("covariance is not positive semidefinite");
}

GaussianModel make_model(Vector mean, Matrix cov) {
  GaussianModel model{std::move(mean), std::move(cov)};
  validate(model);
  return model;
}

std::optional<Index> ConditionalState::local_of(Index node) const {
  const auto it = std::lower_bound(unknown_idx.begin(), unknown_idx.end(), node);
  if (it == unknown_idx.end() || *it != node) return std::nullopt;
  return static_cast<Index>(it - unknown_idx.begin());
}

ConditionalState unconditioned(const GaussianModel& model) {
  ConditionalState s;
  s.unknown_idx.resize(model.dim());
  for (Index k = 0; k < model.dim(); ++k) s.unknown_idx[k] = k;
  s.cond_mean = model.mean;
  s.cond_cov = model.cov;
  return s;
}

ConditionalState condition(const GaussianModel& model, std::span<const Index> idx,
                           std::span<const double> vals) {
  const Index k = model.dim();
  if (idx.size() != vals.size())
    throw ContractViolation("condition: index and value counts differ");
  std::vector<char> seen(k, 0);
  for (Index i : idx) {
    if (i >= k) throw ContractViolation("condition: node index " + std::to_string(i) + " out of range");
    if (seen[i]) throw ContractViolation("condition: duplicate node index " + std::to_string(i));
    seen[i] = 1;
  }
  if (idx.empty()) return unconditioned(model);

  ConditionalState s;
  s.known_idx.assign(idx.begin(), idx.end());
  s.known_vals = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  for (Index i = 0; i < k; ++i)
    if (!seen[i]) s.unknown_idx.push_back(i);

  const auto nz = static_cast<Eigen::Index>(idx.size());
  const auto nu = static_cast<Eigen::Index>(s.unknown_idx.size());
  Matrix rz(nz, nz), ruz(nu, nz), ru(nu, nu);
  Vector dz(nz), mu(nu);
  for (Eigen::Index a = 0; a < nz; ++a) {
    dz(a) = vals[a] - model.mean(idx[a]);
    for (Eigen::Index b = 0; b < nz; ++b) rz(a, b) = model.cov(idx[a], idx[b]);
  }
  for (Eigen::Index a = 0; a < nu; ++a) {
    const Index ua = s.unknown_idx[a];
    mu(a) = model.mean(ua);
    for (Eigen::Index b = 0; b < nz; ++b) ruz(a, b) = model.cov(ua, idx[b]);
    for (Eigen::Index b = 0; b < nu; ++b) ru(a, b) = model.cov(ua, s.unknown_idx[b]);
  }

  const Matrix l = factorize(rz, jitter_for(model.cov), idx);
  const auto tri = l.triangularView<Eigen::Lower>();
  // W = L^{-1} R_zu, so R_uz R_z^{-1} R_zu = W^T W.
  const Matrix w = tri.solve(Matrix(ruz.transpose()));
  const Vector wz = tri.solve(dz);
  s.cond_mean = mu + w.transpose() * wz;
  s.cond_cov = ru - w.transpose() * w;
  s.cond_cov = 0.5 * (s.cond_cov + s.cond_cov.transpose()).eval();
  return s;
}

void schur_eliminate(std::span<const double> cov, Index n, Index local, std::span<double> out) {
  const double* col_l = cov.data() + local * n;
  const double nu = col_l[local];
  const Index m = n - 1;
  const Index tail = n - local - 1;
  for (Index j = 0, jd = 0; j < n; ++j) {
    if (j == local) continue;
    const double* src = cov.data() + j * n;
    double* dst = out.data() + jd * m;
    const double alpha = -col_l[j] / nu;
    kernels::active().axpy_into(dst, src, alpha, col_l, local);
    kernels::active().axpy_into(dst + local, src + local + 1, alpha, col_l + local + 1, tail);
    ++jd;
  }
}

ConditionalState rank_one_condition(const ConditionalState& state, Index local, double value) {
  const Index n = state.unknown_count();
  if (local >= n) throw ContractViolation("rank_one_condition: local index out of range");
  const double nu = state.cond_cov(local, local);
  const Index node = state.unknown_idx[local];
  if (!(nu > kVarianceFloor))
    throw NumericalDegeneracy(
        "conditional variance of node " + std::to_string(node) + " is degenerate", node);

  ConditionalState s;
  s.known_idx = state.known_idx;
  s.known_idx.push_back(node);
  s.known_vals.resize(state.known_vals.size() + 1);
  s.known_vals.head(state.known_vals.size()) = state.known_vals;
  s.known_vals(state.known_vals.size()) = value;
  s.unknown_idx = state.unknown_idx;
  s.unknown_idx.erase(s.unknown_idx.begin() + static_cast<std::ptrdiff_t>(local));

  const auto m = static_cast<Eigen::Index>(n - 1);
  s.cond_cov.resize(m, m);
  schur_eliminate({state.cond_cov.data(), n * n}, n, local, {s.cond_cov.data(), (n - 1) * (n - 1)});

  // E[u_{-l} | z, u_l] = E[u_{-l} | z] + r (u_l - E[u_l | z]) / nu
  const double* r = state.cond_cov.data() + local * n;
  const double gain = (value - state.cond_mean(local)) / nu;
  s.cond_mean.resize(m);
  const double* mean = state.cond_mean.data();
  kernels::active().axpy_into(s.cond_mean.data(), mean, gain, r, local);
  kernels::active().axpy_into(s.cond_mean.data() + local, mean + local + 1, gain, r + local + 1,
                              n - local - 1);
  return s;
}

ConditionalState drop_node(const ConditionalState& state, Index local) {
  const Index n = state.unknown_count();
  if (local >= n) throw ContractViolation("drop_node: local index out of range");
  ConditionalState s;
  s.known_idx = state.known_idx;
  s.known_idx.push_back(state.unknown_idx[local]);
  s.known_vals.resize(state.known_vals.size() + 1);
  s.known_vals.head(state.known_vals.size()) = state.known_vals;
  s.known_vals(state.known_vals.size()) = state.cond_mean(local);
  s.unknown_idx = state.unknown_idx;
  s.unknown_idx.erase(s.unknown_idx.begin() + static_cast<std::ptrdiff_t>(local));

  std::vector<Eigen::Index> keep;
  keep.reserve(n - 1);
  for (Index i = 0; i < n; ++i)
    if (i != local) keep.push_back(static_cast<Eigen::Index>(i));
  s.cond_mean = state.cond_mean(keep);
  s.cond_cov = state.cond_cov(keep, keep);
  return s;
}

GaussianModel build_ar1_model(Index K, double rho) {
  if (K < 1) throw ValidationError("AR(1) model needs K >= 1");
  if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("AR(1) model needs |rho| < 1");
  GaussianModel m{Vector(static_cast<Eigen::Index>(K)),
                  Matrix(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K))};
  for (Index k = 0; k < K; ++k) {
    m.mean(k) = std::cos(std::numbers::pi * static_cast<double>(k) / 5.0);
    for (Index j = 0; j < K; ++j)
      m.cov(k, j) = std::pow(rho, static_cast<double>(k > j ? k - j : j - k));
  }
  return m;
}

Matrix dct_matrix(Index K) {
  const auto n = static_cast<Eigen::Index>(K);
  Matrix d(n, n);
  const double kd = static_cast<double>(K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = i == 0 ? std::sqrt(1.0 / kd) : std::sqrt(2.0 / kd);
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = a * std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * i) / (2.0 * kd));
  }
  return d;
}

std::vector<GaussianModel> build_model_family(Index K, Index J, double noise, Index M, double rho) {
  if (M < 1 || M > 5) throw ValidationError("model family supports 1 to 5 models");
  if (J < 1) throw ValidationError("model family needs J >= 1");
  if (K < J + M - 1) throw ValidationError("model family needs K >= J + M - 1");
  if (!(noise >= 0.0)) throw ValidationError("noise floor must be nonnegative");

  std::vector<GaussianModel> family;
  family.push_back(build_ar1_model(K, rho));
  if (M == 1) return family;

  const Matrix psi = dct_matrix(K);
  const auto n = static_cast<Eigen::Index>(K);
  const double scale = static_cast<double>(K) / (static_cast<double>(J) + noise * static_cast<double>(K));
  for (Index m = 2; m <= M; ++m) {
    GaussianModel g{Vector(n), Matrix::Zero(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      const double arg = std::numbers::pi * static_cast<double>(k) / 5.0;
      switch (m) {
        case 2: g.mean(k) = std::sin(arg); break;
        case 3: g.mean(k) = -std::cos(arg); break;
        case 4: g.mean(k) = -std::sin(arg); break;
        default: g.mean(k) = 0.0; break;
      }
    }
    // 1-based columns m-1 .. J+m-2 are 0-based columns m-2 .. J+m-3.
    for (Index c = m - 2; c <= J + m - 3; ++c) {
      const auto col = psi.col(static_cast<Eigen::Index>(c));
      g.cov.noalias() += col * col.transpose();
    }
    g.cov.diagonal().array() += noise;
    g.cov *= scale;
    family.push_back(std::move(g));
  }
  return family;
}

Matrix sampling_factor(const GaussianModel& model) {
  std::vector<Index> labels(model.dim());
  for (Index k = 0; k < model.dim(); ++k) labels[k] = k;
  return factorize(model.cov, jitter_for(model.cov), labels);
}

}  // namespace das
