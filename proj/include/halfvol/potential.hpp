#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace halfvol {

/// Even double-well potential with non-degenerate zeros at ±1, a convexity
/// constant kappa outside [-alpha, alpha], and power-law tails of exponent
/// q in (2, 11/5) beyond |x| = beta. Immutable after construction; sigma
/// (the per-transition energy integral over [-1,1]) is precomputed.
struct DoubleWellPotential {
  DoubleWellPotential(std::function<double(double)> w_fn,
                      std::function<double(double)> w1_fn,
                      std::function<double(double)> w2_fn, double alpha_in,
                      double kappa_in, double beta_in, double q_in,
                      double c1_in, double c2_in,
                      std::vector<double> smooth_breakpoints = {});

  std::function<double(double)> w;   // value
  std::function<double(double)> w1;  // first derivative
  std::function<double(double)> w2;  // second derivative

  double alpha;  // convexity threshold in (0,1)
  double kappa;  // lower bound for w2 on |x| >= alpha
  double beta;   // tail threshold > 1
  double q;      // tail exponent in (2, 11/5)
  double c1;     // tail constants, 0 < c1 < c2
  double c2;

  double sigma;  // integral of sqrt(w/2) over [-1,1]

  // Points where w is not twice differentiable (quadrature split hints and
  // exclusion zones for derivative spot checks).
  std::vector<double> kinks;
};

/// Quartic core (1-x^2)^2/4 on [-beta,beta] glued to even tails
/// c|x|^q + d, with value and first derivative continuous at ±beta.
/// Throws std::invalid_argument for q outside (2, 11/5) or beta <= 1.
DoubleWellPotential build_glued_quartic(double q, double beta);

struct ConditionCheck {
  bool pass = true;
  double worst_violation = 0.0;  // magnitude of the largest failure
};

/// Per-condition verification results on a symmetric sample grid.
/// Condition indices: 0 smooth/non-negative, 1 even, 2 zeros at ±1,
/// 3 interior maximum, 4 monotonicity pattern, 5 convexity outside alpha,
/// 6 tail growth.
struct PotentialReport {
  std::array<ConditionCheck, 7> conditions;
  int n_samples = 0;
  double x_max = 0.0;
  bool pass = false;

  std::string summary() const;
};

/// Samples the seven structural conditions on a symmetric grid of
/// n_samples points over [-x_max, x_max]. Failures are recorded in the
/// report, never thrown.
PotentialReport verify_potential(const DoubleWellPotential& p, int n_samples,
                                 double x_max);

/// Per-interface energy constant: adaptive quadrature of sqrt(w/2) over
/// [-1,1] to 1e-10 absolute.
double sigma(const DoubleWellPotential& p);

/// Odd primitive of sqrt(w/2) from 0 to s.
double phi_primitive(const DoubleWellPotential& p, double s);

/// Integral of sqrt(w/2) over [x,y] (signed), evaluated directly on the
/// segment so nearby pairs keep relative accuracy.
double phi_between(const DoubleWellPotential& p, double x, double y);

/// Empirical constant for the square-distance bound
/// |x-y|^2 <= C |Phi(x)-Phi(y)|: the max of |x-y|^2/|Phi(x)-Phi(y)| over
/// seeded sample pairs in [-x_max, x_max]. Throws std::runtime_error if a
/// sampled pair has Phi(x)=Phi(y) with x != y.
double phi_quadratic_constant(const DoubleWellPotential& p, int n_pairs,
                              double x_max);

}  // namespace halfvol
