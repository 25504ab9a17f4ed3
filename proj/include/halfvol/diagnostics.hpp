#pragma once

#include "halfvol/energy.hpp"
#include "halfvol/grid.hpp"
#include "halfvol/potential.hpp"

namespace halfvol {

/// Data for the Lagrange-multiplier identity test: psi solves
/// -lap(psi) = mollify(u,eta) - mean(mollify(u,eta)), and the PDE is paired
/// with the scalar field g = grad(psi).grad(u). At a critical point
/// lambda * int(g) equals the pairing of the first variation with g, so the
/// residual collapses to solver tolerance; away from criticality the
/// residual equals |<constrained_gradient, g>| up to roundoff.
struct MultiplierCertificate {
  double eps = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  double pairing = 0.0;             // int grad(psi).grad(u), spectral route
  double pairing_quadrature = 0.0;  // discrete integral of the pointwise dot
  double identity_residual = 0.0;   // |lambda*pairing_quadrature - rhs|
  bool pairing_lower_ok = false;    // pairing >= Vol/4
  bool degenerate = false;          // |pairing| < 1e-8, nothing to certify
  double psi_max = 0.0;             // sup-norm proxies for psi regularity
  double grad_psi_max = 0.0;
  double lap_psi_max = 0.0;
};

MultiplierCertificate multiplier_certificate(const ScalarField& u, double eps,
                                             const DoubleWellPotential& p,
                                             double eta);

/// Integral of (|u|-1)^2.
double interface_defect(const ScalarField& u);

struct DefectReport {
  double eps = 0.0;
  double defect = 0.0;
  double energy_total = 0.0;
  double ratio = 0.0;  // defect / (sqrt(eps) * (1 + energy))
};

DefectReport defect_report(const ScalarField& u, double eps,
                           const DoubleWellPotential& p);

struct MollifierReport {
  double eta = 0.0;
  double l2_diff_sq = 0.0;       // ||mollify(u,eta) - u||_2^2
  double l2_diff_sq_over_eta = 0.0;
  double grad_phi_l1 = 0.0;      // || grad(Phi o u) ||_L1
  double ratio = 0.0;            // (l2_diff_sq/eta) / grad_phi_l1
  double mean_drift = 0.0;       // mean(mollify(u,eta)) - mean(u); zero for
                                 // the intrinsic mollifier
};

MollifierReport mollifier_bounds(const ScalarField& u,
                                 const DoubleWellPotential& p, double eta);

struct LinfCheck {
  double max_abs = 0.0;
  bool ok = false;  // max|u| <= beta + 1e-9
};

LinfCheck linf_check(const ScalarField& u, const DoubleWellPotential& p);

}  // namespace halfvol
