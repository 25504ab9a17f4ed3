#include <doctest.h>

#include <cmath>
#include <numbers>

#include "halfvol/diagnostics.hpp"
#include "halfvol/flow.hpp"
#include "halfvol/rng.hpp"
#include "halfvol/spectral.hpp"

using namespace halfvol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

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

CriticalPoint solve_two_kinks(const TorusGrid& g, double eps,
                              const DoubleWellPotential& pot, double tol) {
  ScalarField u0 = make_field(g, [&](std::array<double, 3> x) {
    return std::cos(kTwoPi * x[0] / g.side(0));
  });
  FlowConfig cfg;
  cfg.tol = tol;
  cfg.compute_index = false;
  return solve_critical(u0, eps, pot, cfg);
}

}  // namespace

TEST_CASE("interface defect of constant fields") {
  TorusGrid g({16, 16}, {1.0, 1.0});
  ScalarField one(g);
  for (double& v : one.values()) v = 1.0;
  CHECK(interface_defect(one) == 0.0);

  ScalarField zero(g);
  CHECK(interface_defect(zero) == doctest::Approx(1.0).epsilon(1e-15));

  ScalarField minus(g);
  for (double& v : minus.values()) v = -1.0;
  CHECK(interface_defect(minus) == 0.0);
}

TEST_CASE("defect decays along the interface sequence") {
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  double prev = 1e300;
  for (double eps : {0.04, 0.02, 0.01}) {
    TorusGrid g({1024}, {1.0});
    CriticalPoint cp = solve_two_kinks(g, eps, pot, 1e-8);
    REQUIRE(cp.converged);
    DefectReport rep = defect_report(cp.u, eps, pot);
    CHECK(rep.defect < prev);
    CHECK(rep.defect >= 0.0);
    prev = rep.defect;
  }
}

TEST_CASE("multiplier certificate is degenerate at zero") {
  TorusGrid g({64}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  MultiplierCertificate cert =
      multiplier_certificate(ScalarField(g), 0.05, pot, 0.05);
  CHECK(cert.degenerate);
  CHECK(cert.pairing == 0.0);
  CHECK_FALSE(cert.pairing_lower_ok);
}

TEST_CASE("multiplier identity is integration-by-parts exact off criticality") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.1, eta = 0.1;
  ScalarField u = random_smooth(g, 71, 1.3);
  MultiplierCertificate cert = multiplier_certificate(u, eps, pot, eta);

  // Reassemble the right-hand side independently.
  ScalarField rhs = mollify(u, eta);
  subtract_mean(rhs);
  ScalarField psi = poisson_solve(rhs);
  auto gp = gradient(psi);
  auto gu = gradient(u);
  ScalarField gfield(u.grid());
  for (int a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < gfield.size(); ++i) {
      gfield[i] += gp[a][i] * gu[a][i];
    }
  }
  ScalarField fv = first_variation(u, eps, pot);
  const double lambda = lagrange_multiplier(u, eps, pot);
  ScalarField shifted = fv;
  for (double& v : shifted.values()) v -= lambda;
  const double expected = std::abs(l2_inner(shifted, gfield));
  CHECK(cert.identity_residual ==
        doctest::Approx(expected).epsilon(1e-12));

  // The two pairing routes agree to spectral accuracy on smooth data.
  CHECK(cert.pairing ==
        doctest::Approx(cert.pairing_quadrature).epsilon(1e-8));
}

TEST_CASE("multiplier certificate collapses at critical points") {
  TorusGrid g({1024}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.02;
  CriticalPoint cp = solve_two_kinks(g, eps, pot, 1e-10);
  REQUIRE(cp.converged);
  MultiplierCertificate cert = multiplier_certificate(cp.u, eps, pot, eps);
  CHECK_FALSE(cert.degenerate);
  CHECK(cert.identity_residual <=
        1e-8 * (1.0 + std::abs(cert.lambda * cert.pairing)));
  CHECK(cert.psi_max > 0.0);
  CHECK(cert.lap_psi_max > 0.0);
}

TEST_CASE("pairing exceeds a quarter of the volume on striped solutions") {
  TorusGrid g({128, 128}, {1.0, 1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.1;
  CriticalPoint cp = solve_two_kinks(g, eps, pot, 1e-9);
  REQUIRE(cp.converged);
  MultiplierCertificate cert = multiplier_certificate(cp.u, eps, pot, eps);
  CHECK(cert.pairing_lower_ok);
  CHECK(cert.pairing >= 0.25 * g.total_volume());
}

TEST_CASE("mollifier bounds: drift-free mean and the mode formula") {
  TorusGrid g({128}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);

  ScalarField mode = make_field(
      g, [](std::array<double, 3> x) { return std::cos(kTwoPi * 2 * x[0]); });
  const double eta = 0.07;
  MollifierReport rep = mollifier_bounds(mode, pot, eta);
  CHECK(std::abs(rep.mean_drift) <= 1e-15);

  const double mu = std::pow(kTwoPi * 2, 2);
  const double shrink = 1.0 - std::exp(-mu * eta * eta);
  const double expect = shrink * shrink * l2_inner(mode, mode);
  CHECK(rep.l2_diff_sq == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mollifier ratio stays bounded across eta halvings") {
  TorusGrid g({2048}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);
  const double eps = 0.01;
  CriticalPoint cp = solve_two_kinks(g, eps, pot, 1e-9);
  REQUIRE(cp.converged);

  double first = -1.0;
  double eta = eps;
  for (int j = 0; j < 5; ++j, eta *= 0.5) {
    MollifierReport rep = mollifier_bounds(cp.u, pot, eta);
    CHECK(std::abs(rep.mean_drift) <= 1e-15);
    CHECK(rep.grad_phi_l1 > 0.0);
    if (first < 0.0) first = rep.ratio;
    CHECK(rep.ratio <= 2.0 * first + 1e-12);
  }
}

TEST_CASE("sup-norm check against the tail threshold") {
  TorusGrid g({64}, {1.0});
  DoubleWellPotential pot = build_glued_quartic(2.1, 5.0);

  ScalarField over(g);
  for (double& v : over.values()) v = pot.beta + 1.0;
  CHECK_FALSE(linf_check(over, pot).ok);

  CriticalPoint cp = solve_two_kinks(TorusGrid({512}, {1.0}), 0.02, pot, 1e-8);
  REQUIRE(cp.converged);
  LinfCheck c = linf_check(cp.u, pot);
  CHECK(c.ok);
  CHECK(c.max_abs <= 1.0 + 1e-6);  // range containment with margin beta - 1
}
