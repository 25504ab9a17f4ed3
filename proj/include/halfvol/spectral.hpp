#pragma once

#include <array>
#include <vector>

#include "halfvol/grid.hpp"

namespace halfvol {

/// Exact spectral Laplacian (diagonal in Fourier space).
ScalarField laplacian(const ScalarField& u);

/// Solves -lap(psi) = g with mean(psi) = 0. The right hand side must be
/// mean-zero: |mean(g)| <= 1e-10 * ||g||_2, otherwise throws
/// std::invalid_argument carrying the offending mean.
ScalarField poisson_solve(const ScalarField& g);

/// Periodic heat-semigroup smoothing at time eta^2 (Fourier multiplier
/// exp(-mu * eta^2)). eta = 0 returns the field unchanged, bit for bit.
ScalarField mollify(const ScalarField& u, double eta);

/// Per-axis spectral derivatives (Nyquist mode zeroed).
std::vector<ScalarField> gradient(const ScalarField& u);

/// Solves (I - nu*lap) out = rhs exactly in Fourier space (nu >= 0).
ScalarField inverse_helmholtz(const ScalarField& rhs, double nu);

/// Dirichlet integral of |grad u|^2, summed in Fourier space.
double dirichlet_form(const ScalarField& u);

/// Squared L2 norm from spectral coefficients (Parseval route).
double spectral_l2sq(const ScalarField& u);

struct BasisMode {
  std::array<int, 3> k{0, 0, 0};  // canonical frequency vector
  double mu = 0.0;                // Laplace eigenvalue
  bool is_sine = false;
};

/// Non-constant real Laplace eigenfunctions on the torus, sorted by
/// eigenvalue (cosine before sine, lexicographic frequency tie-break).
/// Fields are unit L2-normalized and exactly mean-zero under the discrete
/// quadrature. Nyquist frequencies are excluded so cos/sin pairs stay
/// orthonormal on the grid.
class SpectralBasis {
 public:
  SpectralBasis(const TorusGrid& g, int n_modes);

  int size() const { return static_cast<int>(modes_.size()); }
  const BasisMode& mode(int i) const { return modes_[i]; }
  double eigenvalue(int i) const { return modes_[i].mu; }
  ScalarField field(int i) const;
  const TorusGrid& grid() const { return grid_; }

 private:
  TorusGrid grid_;
  std::vector<BasisMode> modes_;
};

}  // namespace halfvol
