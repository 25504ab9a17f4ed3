#include "halfvol/eigs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "halfvol/rng.hpp"

namespace halfvol {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthogonalize w against the first m columns of V and all locked columns,
// twice. Returns the remaining norm.
double project_out(VectorXd& w, const MatrixXd& V, int m, const MatrixXd& L) {
  for (int pass = 0; pass < 2; ++pass) {
    if (m > 0) {
      w.noalias() -= V.leftCols(m) * (V.leftCols(m).transpose() * w);
    }
    if (L.cols() > 0) {
      w.noalias() -= L * (L.transpose() * w);
    }
  }
  return w.norm();
}

}  // namespace

EigsResult smallest_eigenvalues(const LinearOp& apply, std::size_t n,
                                const EigsOptions& opt,
                                const std::vector<std::vector<double>>& locked) {
  const int ni = static_cast<int>(n);
  const int n_locked = static_cast<int>(locked.size());
  const int n_free = ni - n_locked;
  const int n_eigs = std::min(opt.n_eigs, n_free);
  const int block = std::max(1, std::min(opt.block_size, n_free));
  int max_basis = opt.max_basis > 0
                      ? opt.max_basis
                      : std::max(64, 6 * n_eigs + 2 * block + 16);
  max_basis = std::min(max_basis, n_free);

  MatrixXd L(ni, n_locked);
  for (int j = 0; j < n_locked; ++j) {
    for (int i = 0; i < ni; ++i) L(i, j) = locked[j][i];
    L.col(j).normalize();
  }

  max_basis = std::max(max_basis, std::min(n_free, n_eigs + 2 * block));
  MatrixXd V(ni, max_basis);
  MatrixXd AV(ni, max_basis);
  int m = 0;

  CounterRng rng(opt.seed);
  std::uint64_t draw = 0;
  auto fresh_random = [&](VectorXd& w) {
    for (int i = 0; i < ni; ++i) {
      w(i) = rng.normal(1, draw++, 0);
    }
  };

  EigsResult res;
  res.converged = false;
  const int max_applies = 600 + 60 * n_eigs;

  // Appends up to `count` orthonormalized columns built from `source`
  // (replacing rank-deficient directions with fresh random vectors).
  auto append_block = [&](const MatrixXd& source, int count) {
    for (int j = 0; j < count && m < max_basis; ++j) {
      VectorXd w = j < source.cols() ? VectorXd(source.col(j))
                                     : VectorXd::Zero(ni);
      double norm = project_out(w, V, m, L);
      const double floor = 1e-8 * std::max(1.0, source.cols() > j
                                                    ? source.col(j).norm()
                                                    : 1.0);
      int guard = 0;
      while (norm < floor && guard++ < 8) {
        fresh_random(w);
        norm = project_out(w, V, m, L);
      }
      if (norm <= 0.0) continue;
      V.col(m) = w / norm;
      m += 1;
    }
  };

  MatrixXd seedblk(ni, block);
  {
    VectorXd w(ni);
    for (int j = 0; j < block; ++j) {
      fresh_random(w);
      seedblk.col(j) = w;
    }
  }
  append_block(seedblk, block);

  const double scale = std::max(std::abs(opt.norm_scale), 1e-30);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  VectorXd theta;
  MatrixXd Y;

  int applied = 0;
  while (true) {
    // Apply the operator to the new columns.
    for (int j = applied; j < m; ++j) {
      apply(std::span<const double>(V.col(j).data(), n),
            std::span<double>(AV.col(j).data(), n));
      res.applies += 1;
    }
    applied = m;

    MatrixXd T = V.leftCols(m).transpose() * AV.leftCols(m);
    T = 0.5 * (T + T.transpose()).eval();
    es.compute(T);
    theta = es.eigenvalues();
    Y = es.eigenvectors();

    const int want = std::min(n_eigs, m);
    res.values.assign(theta.data(), theta.data() + want);
    res.residuals.resize(want);
    bool ok = (want == n_eigs);
    for (int j = 0; j < want; ++j) {
      VectorXd x = V.leftCols(m) * Y.col(j);
      VectorXd ax = AV.leftCols(m) * Y.col(j);
      res.residuals[j] = (ax - theta(j) * x).norm();
      if (res.residuals[j] > opt.tol * scale) ok = false;
    }
    if (ok || res.applies >= max_applies) {
      res.converged = ok;
      return res;
    }

    if (m + block > max_basis) {
      // Thick restart: compress onto the best Ritz vectors and continue.
      const int keep = std::min(m, std::max(n_eigs + block, 2 * n_eigs));
      MatrixXd Vk = V.leftCols(m) * Y.leftCols(keep);
      MatrixXd AVk = AV.leftCols(m) * Y.leftCols(keep);
      V.leftCols(keep) = Vk;
      AV.leftCols(keep) = AVk;
      m = keep;
      applied = keep;
      T = V.leftCols(m).transpose() * AV.leftCols(m);
      T = 0.5 * (T + T.transpose()).eval();
      es.compute(T);
      theta = es.eigenvalues();
      Y = es.eigenvectors();
    }

    // Expand with (preconditioned) residuals of the lowest Ritz pairs.
    const int add = std::min(block, max_basis - m);
    MatrixXd next(ni, add);
    for (int j = 0; j < add && j < m; ++j) {
      VectorXd x = V.leftCols(m) * Y.col(j);
      VectorXd r = AV.leftCols(m) * Y.col(j) - theta(j) * x;
      if (opt.preconditioner) {
        VectorXd pr(ni);
        opt.preconditioner(std::span<const double>(r.data(), n),
                           std::span<double>(pr.data(), n));
        next.col(j) = pr;
      } else {
        next.col(j) = r;
      }
    }
    const int before = m;
    append_block(next, add);
    if (m == before) {
      res.converged = ok;
      return res;  // subspace exhausted
    }
  }
}

}  // namespace halfvol
