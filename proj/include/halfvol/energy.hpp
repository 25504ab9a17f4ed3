#pragma once

#include <cstdint>
#include <vector>

#include "halfvol/grid.hpp"
#include "halfvol/potential.hpp"

namespace halfvol {

struct EnergyBreakdown {
  double dirichlet = 0.0;   // (eps/2) * int |grad u|^2
  double potential = 0.0;   // int w(u)/eps
  double total = 0.0;
  double normalized = 0.0;  // total / (2 sigma)
};

EnergyBreakdown energy(const ScalarField& u, double eps,
                       const DoubleWellPotential& p);

/// Gradient field of the energy: -eps*lap(u) + w'(u)/eps.
ScalarField first_variation(const ScalarField& u, double eps,
                            const DoubleWellPotential& p);

/// mean(w'(u))/eps; the constant that makes u critical for the free
/// functional when it is critical for the mean-constrained one.
double lagrange_multiplier(const ScalarField& u, double eps,
                           const DoubleWellPotential& p);

/// First variation projected onto mean-zero test directions.
ScalarField constrained_gradient(const ScalarField& u, double eps,
                                 const DoubleWellPotential& p);

/// Hessian action: L v = -eps*lap(v) + (w''(u)/eps) v.
ScalarField second_variation_apply(const ScalarField& u, double eps,
                                   const DoubleWellPotential& p,
                                   const ScalarField& v);

struct IndexResult {
  int negative_count = 0;
  bool converged = false;
  std::vector<double> eigenvalues;  // m lowest on the mean-zero subspace
  std::vector<double> residuals;
  double neg_cutoff = 0.0;
};

/// Morse index of u for the energy restricted to mean-zero fields: the
/// number of the m lowest Hessian eigenvalues (constant mode deflated)
/// falling below -1e-6*||L||_est. Iterative, operator access only.
IndexResult constrained_index(const ScalarField& u, double eps,
                              const DoubleWellPotential& p, int m,
                              std::uint64_t seed = 0x5eedULL);

/// Rough operator-norm scale of the Hessian at u (used for eigenvalue
/// cutoffs/tolerances).
double hessian_norm_scale(const ScalarField& u, double eps,
                          const DoubleWellPotential& p);

}  // namespace halfvol
