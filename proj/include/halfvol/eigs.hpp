#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace halfvol {

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

struct EigsOptions {
  int n_eigs = 1;
  int block_size = 8;
  int max_basis = 0;       // 0: auto
  double tol = 1e-9;       // residual tolerance relative to the norm scale
  double norm_scale = 1.0; // estimate of ||A||, used in tolerances
  std::uint64_t seed = 0x5eedULL;
  // Optional SPD preconditioner applied to residuals before expanding the
  // search space (Davidson-style). Essential when the spectrum spread is
  // large, as for spectral Laplacians.
  LinearOp preconditioner;
};

struct EigsResult {
  std::vector<double> values;     // lowest Ritz values, ascending
  std::vector<double> residuals;  // ||A x - theta x|| per value
  bool converged = false;
  int applies = 0;
};

/// Lowest eigenvalues of a symmetric operator given only matrix-vector
/// access: block Krylov iteration with full reorthogonalization and
/// Rayleigh-Ritz extraction. `locked` directions (not required to be
/// orthonormal among themselves beyond normalization) are projected out of
/// the working subspace, so the spectrum is computed on their orthogonal
/// complement.
EigsResult smallest_eigenvalues(const LinearOp& apply, std::size_t n,
                                const EigsOptions& opt,
                                const std::vector<std::vector<double>>& locked = {});

}  // namespace halfvol
