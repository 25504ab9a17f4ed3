#pragma once

#include <cmath>

#include "halfvol/energy.hpp"
#include "halfvol/grid.hpp"
#include "halfvol/potential.hpp"

namespace halfvol {

/// Roundoff resolution of the discrete energy: quadrature sums over n
/// points carry O(sqrt(n)) ulp noise, so energy comparisons are only
/// meaningful above this threshold.
inline double energy_roundoff_slack(double total, std::size_t n) {
  return 8.0 * 2.22e-16 * std::sqrt(static_cast<double>(n)) *
         (1.0 + std::abs(total));
}

struct FlowConfig {
  double tau = 0.0;      // initial step; 0 = auto (eps)
  double tol = 0.0;      // residual tolerance; 0 = auto (1e-8 * sqrt(Vol))
  long max_iters = 200000;
  double backtrack_factor = 0.5;  // in (0,1)
  double min_tau = 1e-14;
  bool compute_index = true;
  int index_modes = 8;
  std::size_t index_max_points = 1u << 17;  // skip index above this size

  double resolved_tau(double eps) const { return tau > 0.0 ? tau : eps; }
  double resolved_tol(double vol) const;
};

struct CriticalPoint {
  ScalarField u;
  double eps = 0.0;
  double lambda = 0.0;    // Lagrange multiplier at u
  double residual = 0.0;  // L2 norm of the constrained gradient
  EnergyBreakdown energy;
  int index_estimate = -1;  // -1: not computed / not near-critical
  long iterations = 0;
  bool converged = false;
  bool tau_underflow = false;
  double final_tau = 0.0;
  double max_mean_ratio = 0.0;  // max |mean(u)|/||u|| over accepted iterates
  // Largest per-step energy increase ever accepted; bounded by the
  // roundoff slack, so the descent is monotone up to floating-point noise.
  double max_energy_uptick = 0.0;
  long backtracks = 0;
};

/// One semi-implicit step of the mean-preserving gradient flow:
/// u+ = (I - tau*eps*lap)^{-1} (u - tau*(w'(u)/eps - lambda(u))).
/// The stiff Laplacian is inverted exactly in Fourier space; the shift by
/// lambda keeps the discrete mean unchanged up to roundoff.
ScalarField flow_step(const ScalarField& u, double eps,
                      const DoubleWellPotential& p, double tau);

/// Descends the constrained energy from u0 (mean subtracted on entry) until
/// the constrained gradient drops below tol. Steps that raise the energy are
/// rejected and tau is shrunk by backtrack_factor. Returns a partial result
/// flagged non-converged when max_iters or min_tau is hit.
CriticalPoint solve_critical(const ScalarField& u0, double eps,
                             const DoubleWellPotential& p,
                             const FlowConfig& cfg);

}  // namespace halfvol
