#include <doctest.h>

#include <cmath>
#include <numbers>

#include "halfvol/flow.hpp"
#include "halfvol/rng.hpp"
#include "halfvol/spectral.hpp"

using namespace halfvol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField cos_mode(const TorusGrid& g, int k, double amp = 1.0) {
  return make_field(g, [&](std::array<double, 3> x) {
    return amp * std::cos(kTwoPi * k * x[0] / g.side(0));
  });
}

ScalarField random_smooth(const TorusGrid& g, std::uint64_t seed,
                          double amplitude = 1.0) {
  CounterRng rng(seed);
  ScalarField u(g);
  SpectralBasis basis(g, 10);
  for (int i = 0; i < basis.size(); ++i) {
    axpy(u, amplitude * rng.normal(3, i, 0) / (1.0 + basis.eigenvalue(i)),
         basis.field(i));
  }
  return u;
}

}  // namespace

TEST_CASE("flow step fixes the zero field") {
  TorusGrid g({64}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  ScalarField zero(g);
  ScalarField next = flow_step(zero, 0.05, pot, 0.05);
  CHECK(linf_norm(next) == 0.0);
}

TEST_CASE("flow step grows unstable modes at the linearized rate") {
  TorusGrid g({256}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.05, tau = 0.05;
  ScalarField u = cos_mode(g, 1, 1e-6);
  ScalarField next = flow_step(u, eps, pot, tau);

  // Linearization around 0: multiplier (1 + tau/eps)/(1 + tau*eps*mu).
  const double mu = kTwoPi * kTwoPi;
  const double factor = (1.0 + tau / eps) / (1.0 + tau * eps * mu);
  CHECK(factor > 1.0);
  CHECK(l2_norm(next) / l2_norm(u) == doctest::Approx(factor).epsilon(1e-9));
  CHECK(std::abs(mean(next)) <= 1e-12 * l2_norm(next));
}

TEST_CASE("flow step approximates the negative constrained gradient") {
  TorusGrid g({128}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.1;
  ScalarField u = random_smooth(g, 3);
  ScalarField cg = constrained_gradient(u, eps, pot);

  auto taylor_err = [&](double tau) {
    ScalarField next = flow_step(u, eps, pot, tau);
    ScalarField rate(g);
    for (std::size_t i = 0; i < rate.size(); ++i) {
      rate[i] = (next[i] - u[i]) / tau + cg[i];
    }
    return l2_norm(rate);
  };
  const double e1 = taylor_err(1e-6);
  const double e2 = taylor_err(5e-7);
  CHECK(e1 <= 1e-4 * l2_norm(cg));
  CHECK(e2 <= 0.6 * e1);  // first order in tau
}

TEST_CASE("flow preserves the mean exactly enough") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  ScalarField u = random_smooth(g, 9);
  subtract_mean(u);
  ScalarField v = u;
  for (int i = 0; i < 25; ++i) {
    v = flow_step(v, 0.1, pot, 0.1);
    CHECK(std::abs(mean(v)) <= 1e-13 * (1.0 + l2_norm(v)));
  }
}

TEST_CASE("solve from a cosine reaches the two-interface solution") {
  TorusGrid g({256}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  FlowConfig cfg;
  CriticalPoint cp = solve_critical(cos_mode(g, 1), 0.05, pot, cfg);
  REQUIRE(cp.converged);
  CHECK(cp.energy.normalized == doctest::Approx(2.0).epsilon(0.025));
  CHECK(std::abs(cp.lambda) <= 1e-3);
  CHECK(cp.max_mean_ratio <= 1e-12);
  CHECK(cp.max_energy_uptick <=
        energy_roundoff_slack(cp.energy.total, cp.u.grid().npoints()));
  CHECK(linf_norm(cp.u) <= pot.beta);
  CHECK(cp.index_estimate >= 0);

  // Residual recomputed from scratch matches the reported one.
  ScalarField cg = constrained_gradient(cp.u, 0.05, pot);
  CHECK(l2_norm(cg) == doctest::Approx(cp.residual).epsilon(1e-10));
}

TEST_CASE("solve from zero returns immediately") {
  TorusGrid g({32, 32}, {1.0, 1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  CriticalPoint cp = solve_critical(ScalarField(g), 0.1, pot, FlowConfig{});
  CHECK(cp.converged);
  CHECK(cp.iterations == 0);
  CHECK(cp.residual == 0.0);
}

TEST_CASE("solve from random data satisfies the multiplier equation") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  ScalarField u0 = random_smooth(g, 1234, 2.0);
  FlowConfig cfg;
  cfg.tol = 1e-6;
  cfg.compute_index = false;
  CriticalPoint cp = solve_critical(u0, 0.1, pot, cfg);
  REQUIRE(cp.converged);

  // Pointwise PDE residual: -eps*lap(u) + w'(u)/eps - lambda.
  ScalarField res = first_variation(cp.u, 0.1, pot);
  for (double& v : res.values()) v -= cp.lambda;
  CHECK(l2_norm(res) <= cfg.tol * (1.0 + 1e-6));
  CHECK(cp.max_mean_ratio <= 1e-12);
}

TEST_CASE("interface energy is scale invariant") {
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  for (double scale : {0.5, 2.0}) {
    TorusGrid g({512}, {scale});
    FlowConfig cfg;
    cfg.compute_index = false;
    CriticalPoint cp =
        solve_critical(cos_mode(g, 1), 0.02 * scale, pot, cfg);
    REQUIRE(cp.converged);
    CHECK(cp.energy.normalized == doctest::Approx(2.0).epsilon(0.025));
  }
}
