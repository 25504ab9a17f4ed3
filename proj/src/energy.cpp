#include "halfvol/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "halfvol/eigs.hpp"
#include "halfvol/spectral.hpp"

namespace halfvol {

EnergyBreakdown energy(const ScalarField& u, double eps,
                       const DoubleWellPotential& p) {
  if (!(eps > 0.0)) throw std::invalid_argument("energy: eps must be > 0");
  EnergyBreakdown e;
  e.dirichlet = 0.5 * eps * dirichlet_form(u);
  double s = 0.0;
  for (double v : u.values()) s += p.w(v);
  e.potential = s * u.grid().cell_volume() / eps;
  e.total = e.dirichlet + e.potential;
  e.normalized = e.total / (2.0 * p.sigma);
  return e;
}

ScalarField first_variation(const ScalarField& u, double eps,
                            const DoubleWellPotential& p) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("first_variation: eps must be > 0");
  }
  ScalarField g = laplacian(u);
  const auto uv = u.values();
  auto gv = g.values();
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < gv.size(); ++i) {
    gv[i] = -eps * gv[i] + p.w1(uv[i]) * inv_eps;
  }
  return g;
}

double lagrange_multiplier(const ScalarField& u, double eps,
                           const DoubleWellPotential& p) {
  double s = 0.0;
  for (double v : u.values()) s += p.w1(v);
  const double mean_w1 =
      s * u.grid().cell_volume() / u.grid().total_volume();
  return mean_w1 / eps;
}

ScalarField constrained_gradient(const ScalarField& u, double eps,
                                 const DoubleWellPotential& p) {
  ScalarField g = first_variation(u, eps, p);
  subtract_mean(g);
  return g;
}

ScalarField second_variation_apply(const ScalarField& u, double eps,
                                   const DoubleWellPotential& p,
                                   const ScalarField& v) {
  ScalarField out = laplacian(v);
  const auto uv = u.values();
  const auto vv = v.values();
  auto ov = out.values();
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < ov.size(); ++i) {
    ov[i] = -eps * ov[i] + p.w2(uv[i]) * inv_eps * vv[i];
  }
  return out;
}

double hessian_norm_scale(const ScalarField& u, double eps,
                          const DoubleWellPotential& p) {
  const TorusGrid& g = u.grid();
  double mu_max = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double omega = std::numbers::pi * g.res(a) / g.side(a);
    mu_max += omega * omega;
  }
  double w2_max = 0.0;
  for (double v : u.values()) w2_max = std::max(w2_max, std::abs(p.w2(v)));
  return eps * mu_max + w2_max / eps;
}

IndexResult constrained_index(const ScalarField& u, double eps,
                              const DoubleWellPotential& p, int m,
                              std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("constrained_index: need m >= 1");
  const TorusGrid& grid = u.grid();
  const std::size_t n = grid.npoints();

  // Hessian with the constant mode deflated: v -> P L P v.
  LinearOp apply = [&](std::span<const double> in, std::span<double> out) {
    ScalarField v(grid, std::vector<double>(in.begin(), in.end()));
    subtract_mean(v);
    ScalarField lv = second_variation_apply(u, eps, p, v);
    subtract_mean(lv);
    for (std::size_t i = 0; i < n; ++i) out[i] = lv[i];
  };

  const double scale = hessian_norm_scale(u, eps, p);

  // Spectral preconditioner 1/(eps*mu + c0): collapses the Laplacian's
  // spectral spread so the lowest eigenvalues converge grid-independently.
  double w2_max = 1.0;
  for (double v : u.values()) w2_max = std::max(w2_max, std::abs(p.w2(v)));
  const double c0 = w2_max / eps;
  LinearOp precond = [&, c0](std::span<const double> in,
                             std::span<double> out) {
    ScalarField r(grid, std::vector<double>(in.begin(), in.end()));
    ScalarField pr = inverse_helmholtz(r, eps / c0);
    subtract_mean(pr);
    for (std::size_t i = 0; i < n; ++i) out[i] = pr[i] / c0;
  };

  EigsOptions opt;
  opt.n_eigs = m;
  opt.block_size = std::min<std::size_t>(8, n);
  opt.tol = 1e-9;
  opt.norm_scale = scale;
  opt.seed = seed;
  opt.preconditioner = precond;

  std::vector<std::vector<double>> locked(1, std::vector<double>(n, 1.0));
  EigsResult er = smallest_eigenvalues(apply, n, opt, locked);

  IndexResult res;
  res.converged = er.converged;
  res.eigenvalues = er.values;
  res.residuals = er.residuals;
  res.neg_cutoff = -1e-6 * scale;
  for (double t : er.values) {
    if (t < res.neg_cutoff) res.negative_count += 1;
  }
  return res;
}

}  // namespace halfvol
