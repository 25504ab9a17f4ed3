#include "halfvol/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "halfvol/spectral.hpp"

namespace halfvol {

double FlowConfig::resolved_tol(double vol) const {
  return tol > 0.0 ? tol : 1e-8 * std::sqrt(vol);
}

ScalarField flow_step(const ScalarField& u, double eps,
                      const DoubleWellPotential& p, double tau) {
  if (!(eps > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("flow_step: eps and tau must be > 0");
  }
  const double lambda = lagrange_multiplier(u, eps, p);
  ScalarField rhs(u.grid());
  const auto uv = u.values();
  auto rv = rhs.values();
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < rv.size(); ++i) {
    rv[i] = uv[i] - tau * (p.w1(uv[i]) * inv_eps - lambda);
  }
  return inverse_helmholtz(rhs, tau * eps);
}

CriticalPoint solve_critical(const ScalarField& u0, double eps,
                             const DoubleWellPotential& p,
                             const FlowConfig& cfg) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("solve_critical: eps must be > 0");
  }
  if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0)) {
    throw std::invalid_argument(
        "solve_critical: backtrack_factor must lie in (0,1)");
  }

  const double vol = u0.grid().total_volume();
  const double tol = cfg.resolved_tol(vol);
  double tau = cfg.resolved_tau(eps);

  CriticalPoint cp{ScalarField(u0.grid())};
  cp.eps = eps;

  ScalarField u = u0;
  subtract_mean(u);

  EnergyBreakdown e = energy(u, eps, p);
  ScalarField g = constrained_gradient(u, eps, p);
  double res = l2_norm(g);

  auto track_mean = [&cp](const ScalarField& v) {
    const double nv = l2_norm(v);
    if (nv > 0.0) {
      cp.max_mean_ratio =
          std::max(cp.max_mean_ratio, std::abs(mean(v)) / nv);
    }
  };
  track_mean(u);

  const double tau0 = tau;
  long iter = 0;
  while (res > tol && iter < cfg.max_iters) {
    ScalarField cand = flow_step(u, eps, p, tau);
    subtract_mean(cand);  // remove roundoff drift, keeps criterion exact
    EnergyBreakdown ec = energy(cand, eps, p);
    // Near the limit the true decrease falls below the quadrature's
    // roundoff, so monotonicity can only be enforced up to that noise.
    const double fp_slack =
        energy_roundoff_slack(e.total, u.grid().npoints());
    if (ec.total <= e.total + fp_slack) {
      cp.max_energy_uptick =
          std::max(cp.max_energy_uptick, ec.total - e.total);
      u = std::move(cand);
      e = ec;
      g = constrained_gradient(u, eps, p);
      res = l2_norm(g);
      track_mean(u);
      ++iter;
      tau = std::min(tau0, tau * 1.25);
    } else {
      tau *= cfg.backtrack_factor;
      cp.backtracks += 1;
      if (tau < cfg.min_tau) {
        cp.tau_underflow = true;
        break;
      }
    }
  }

  cp.u = std::move(u);
  cp.lambda = lagrange_multiplier(cp.u, eps, p);
  cp.residual = res;
  cp.energy = e;
  cp.iterations = iter;
  cp.converged = res <= tol;
  cp.final_tau = tau;

  const bool near_critical = res <= 1e-6 * std::sqrt(vol);
  if (cfg.compute_index && near_critical &&
      cp.u.grid().npoints() <= cfg.index_max_points) {
    cp.index_estimate =
        constrained_index(cp.u, eps, p, cfg.index_modes).negative_count;
  }
  return cp;
}

}  // namespace halfvol
