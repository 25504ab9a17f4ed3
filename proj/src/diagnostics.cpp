#include "halfvol/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "halfvol/spectral.hpp"

namespace halfvol {

MultiplierCertificate multiplier_certificate(const ScalarField& u, double eps,
                                             const DoubleWellPotential& p,
                                             double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("multiplier_certificate: eta must be > 0");
  }
  MultiplierCertificate cert;
  cert.eps = eps;
  cert.eta = eta;
  cert.lambda = lagrange_multiplier(u, eps, p);

  ScalarField rhs = mollify(u, eta);
  subtract_mean(rhs);
  ScalarField psi = poisson_solve(rhs);

  // Spectral pairing: int grad(psi).grad(u) = -<psi, lap(u)>.
  cert.pairing = -l2_inner(psi, laplacian(u));

  // Pointwise pairing field g = grad(psi).grad(u).
  const auto gpsi = gradient(psi);
  const auto gu = gradient(u);
  ScalarField g(u.grid());
  for (int a = 0; a < u.grid().dim(); ++a) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += gpsi[a][i] * gu[a][i];
    }
  }
  cert.pairing_quadrature = integrate(g);

  ScalarField fv = first_variation(u, eps, p);
  const double rhs_pairing = l2_inner(fv, g);
  cert.identity_residual =
      std::abs(cert.lambda * cert.pairing_quadrature - rhs_pairing);

  cert.degenerate = std::abs(cert.pairing) < 1e-8;
  cert.pairing_lower_ok =
      !cert.degenerate && cert.pairing >= 0.25 * u.grid().total_volume();

  cert.psi_max = linf_norm(psi);
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < u.grid().dim(); ++a) s += gpsi[a][i] * gpsi[a][i];
    gmax = std::max(gmax, s);
  }
  cert.grad_psi_max = std::sqrt(gmax);
  cert.lap_psi_max = linf_norm(rhs);  // -lap(psi) equals the rhs exactly
  return cert;
}

double interface_defect(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.values()) {
    const double d = std::abs(v) - 1.0;
    s += d * d;
  }
  return s * u.grid().cell_volume();
}

DefectReport defect_report(const ScalarField& u, double eps,
                           const DoubleWellPotential& p) {
  DefectReport rep;
  rep.eps = eps;
  rep.defect = interface_defect(u);
  rep.energy_total = energy(u, eps, p).total;
  rep.ratio = rep.defect / (std::sqrt(eps) * (1.0 + rep.energy_total));
  return rep;
}

MollifierReport mollifier_bounds(const ScalarField& u,
                                 const DoubleWellPotential& p, double eta) {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("mollifier_bounds: eta must be > 0");
  }
  MollifierReport rep;
  rep.eta = eta;

  ScalarField smoothed = mollify(u, eta);
  rep.mean_drift = mean(smoothed) - mean(u);

  double diff_sq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = smoothed[i] - u[i];
    diff_sq += d * d;
  }
  rep.l2_diff_sq = diff_sq * u.grid().cell_volume();
  rep.l2_diff_sq_over_eta = rep.l2_diff_sq / eta;

  // Phi o u via a cumulative table (quadrature per point would be wasteful).
  const double umax = linf_norm(u) + 1.0;
  const int table_n = 4096;
  std::vector<double> phi(table_n + 1, 0.0);
  const double h = 2.0 * umax / table_n;
  auto integrand = [&p](double s) {
    return std::sqrt(std::max(p.w(s), 0.0) / 2.0);
  };
  for (int i = 1; i <= table_n; ++i) {
    const double a = -umax + (i - 1) * h;
    const double b = -umax + i * h;
    phi[i] = phi[i - 1] +
             (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b)) *
                 h / 6.0;
  }
  auto phi_of = [&](double x) {
    const double pos = (x + umax) / h;
    const int i = std::min(table_n - 1, std::max(0, static_cast<int>(pos)));
    const double frac = pos - i;
    return phi[i] + frac * (phi[i + 1] - phi[i]);
  };
  ScalarField w(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = phi_of(u[i]);

  const auto gw = gradient(w);
  double l1 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < u.grid().dim(); ++a) s += gw[a][i] * gw[a][i];
    l1 += std::sqrt(s);
  }
  rep.grad_phi_l1 = l1 * u.grid().cell_volume();
  rep.ratio = rep.grad_phi_l1 > 0.0
                  ? rep.l2_diff_sq_over_eta / rep.grad_phi_l1
                  : 0.0;
  return rep;
}

LinfCheck linf_check(const ScalarField& u, const DoubleWellPotential& p) {
  LinfCheck c;
  c.max_abs = linf_norm(u);
  c.ok = c.max_abs <= p.beta + 1e-9;
  return c;
}

}  // namespace halfvol
