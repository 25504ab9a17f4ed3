#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "halfvol/minmax.hpp"
#include "halfvol/rng.hpp"

using namespace halfvol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DoubleWellPotential quartic() { return build_glued_quartic(2.1, 5.0); }

}  // namespace

TEST_CASE("family slice definition unrolled") {
  TorusGrid g({256}, {1.0});
  SpectralBasis basis(g, 2);
  SweepoutFamily fam = make_family(0, true, basis, 0.25, ProfileKind::Tanh);
  const double a[1] = {1.0};
  ScalarField u = family_slice(fam, a);

  ScalarField raw = make_field(g, [&](std::array<double, 3> x) {
    return std::tanh(std::sqrt(2.0) * std::cos(kTwoPi * x[0]) / 0.25);
  });
  const double m = mean(raw);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(u[i] == doctest::Approx(raw[i] - m).epsilon(1e-13));
  }
  CHECK(std::abs(mean(u)) <= 1e-15);
}

TEST_CASE("slices are exactly odd in the parameter") {
  TorusGrid g({32, 32}, {1.0, 1.0});
  SpectralBasis basis(g, 6);
  for (ProfileKind prof : {ProfileKind::Tanh, ProfileKind::Clamp}) {
    SweepoutFamily fam = make_family(2, true, basis, 0.5, prof);
    CounterRng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      auto a = rng.sphere_point(3, 1, trial);
      std::vector<double> na(a);
      for (double& x : na) x = -x;
      ScalarField up = family_slice(fam, a);
      ScalarField un = family_slice(fam, na);
      for (std::size_t i = 0; i < up.size(); ++i) {
        CHECK(up[i] == -un[i]);  // bit-exact oddness
      }
    }
  }
}

TEST_CASE("degenerate slices fault with the parameter") {
  TorusGrid g({32}, {1.0});
  SweepoutFamily fam;
  fam.p = 0;
  fam.constrained = false;
  fam.delta = 1.0;
  fam.modes.push_back(ScalarField(g));  // zero mode: every slice vanishes
  const double a[1] = {1.0};
  CHECK_THROWS_AS(family_slice(fam, a), std::runtime_error);
}

TEST_CASE("family slice requires a unit parameter") {
  TorusGrid g({32}, {1.0});
  SpectralBasis basis(g, 2);
  SweepoutFamily fam = make_family(0, true, basis, 0.5, ProfileKind::Tanh);
  const double a[1] = {2.0};
  CHECK_THROWS_AS(family_slice(fam, a), std::invalid_argument);
}

TEST_CASE("wide-profile slices linearize") {
  TorusGrid g({64}, {1.0});
  SpectralBasis basis(g, 3);
  const double delta = 1e6;
  SweepoutFamily fam = make_family(1, true, basis, delta, ProfileKind::Tanh);
  const double a[2] = {0.6, -0.8};
  ScalarField u = family_slice(fam, a);
  ScalarField f(g);
  axpy(f, a[0], fam.modes[0]);
  axpy(f, a[1], fam.modes[1]);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(u[i] == doctest::Approx(f[i] / delta).epsilon(1e-9));
  }
}

TEST_CASE("family max over the zero-sphere is the single slice energy") {
  TorusGrid g({256}, {1.0});
  DoubleWellPotential pot = quartic();
  SpectralBasis basis(g, 2);
  SweepoutFamily fam = make_family(0, true, basis, 0.1, ProfileKind::Tanh);
  FamilyMax fm = family_max(fam, 0.05, pot, {100, 0});
  const double a[1] = {1.0};
  const double direct = energy(family_slice(fam, a), 0.05, pot).normalized;
  CHECK(fm.value == direct);
  CHECK(fm.min_slice_norm > 1e-8);
}

TEST_CASE("family max enforces the sampler size") {
  TorusGrid g({64}, {1.0});
  SpectralBasis basis(g, 4);
  SweepoutFamily fam = make_family(1, true, basis, 0.25, ProfileKind::Tanh);
  CHECK_THROWS_AS(family_max(fam, 0.05, quartic(), {150, 0}),
                  std::invalid_argument);
}

TEST_CASE("family max is stable under sampler refinement") {
  TorusGrid g({256}, {1.0});
  DoubleWellPotential pot = quartic();
  SpectralBasis basis(g, 4);
  SweepoutFamily fam = make_family(1, true, basis, 0.125, ProfileKind::Tanh);
  FamilyMax a = family_max(fam, 0.05, pot, {200, 7});
  FamilyMax b = family_max(fam, 0.05, pot, {400, 7});
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-4));
}

TEST_CASE("the argmax is reported up to the antipode") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  DoubleWellPotential pot = quartic();
  SpectralBasis basis(g, 4);
  SweepoutFamily fam = make_family(1, true, basis, 0.25, ProfileKind::Tanh);
  FamilyMax fm = family_max(fam, 0.1, pot, {200, 3});
  std::vector<double> na(fm.argmax);
  for (double& x : na) x = -x;
  const double ep = energy(family_slice(fam, fm.argmax), 0.1, pot).normalized;
  const double en = energy(family_slice(fam, na), 0.1, pot).normalized;
  CHECK(ep == en);  // evenness makes both parameters equivalent maxima
  CHECK(fm.value >= ep - 1e-12);
}

TEST_CASE("swapping the torus axes leaves the family max unchanged") {
  TorusGrid g({32, 32}, {1.0, 1.0});
  DoubleWellPotential pot = quartic();
  SpectralBasis basis(g, 4);
  // Modes 0,1 are the x-pair; modes 2,3 the y-pair of the same eigenvalue.
  const int x_pair[2] = {0, 1};
  const int y_pair[2] = {2, 3};
  SweepoutFamily fx =
      make_family(1, true, basis, 0.25, ProfileKind::Tanh, x_pair);
  SweepoutFamily fy =
      make_family(1, true, basis, 0.25, ProfileKind::Tanh, y_pair);
  FamilyMax mx = family_max(fx, 0.2, pot, {200, 11});
  FamilyMax my = family_max(fy, 0.2, pot, {200, 11});
  CHECK(mx.value == doctest::Approx(my.value).epsilon(1e-12));
}

TEST_CASE("constrained width on the circle counts two interfaces") {
  TorusGrid g({1024}, {1.0});
  DoubleWellPotential pot = quartic();
  SearchConfig sc;
  WidthEstimate est = optimize_family(1, 0.02, pot, true, g, sc);
  CHECK(est.value == doctest::Approx(2.0).epsilon(0.05));
  CHECK(est.constrained);
}

TEST_CASE("unconstrained p=0 width collapses to the pure phases") {
  TorusGrid g({256}, {1.0});
  DoubleWellPotential pot = quartic();
  SearchConfig sc;
  WidthEstimate est = optimize_family(0, 0.05, pot, false, g, sc);
  CHECK(est.value <= 1e-8);
}

TEST_CASE("width estimates grow with p") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  DoubleWellPotential pot = quartic();
  SearchConfig sc;
  WidthEstimate p1 = optimize_family(1, 0.2, pot, true, g, sc);
  WidthEstimate p2 = optimize_family(2, 0.2, pot, true, g, sc);
  CHECK(p1.value <= p2.value + 0.05 * p2.value);
}

TEST_CASE("refinement tightens and reports the multiplier") {
  TorusGrid g({512}, {1.0});
  DoubleWellPotential pot = quartic();
  SearchConfig sc;
  WidthEstimate est = optimize_family(1, 0.02, pot, true, g, sc);
  FlowConfig fc;
  fc.max_iters = 5000;
  fc.tol = 1e-7;
  WidthEstimate ref = refine_argmax(est, pot, fc);
  CHECK(ref.refined);
  CHECK(ref.refined_value <= est.value + 1e-12);
  CHECK(std::abs(ref.lambda) <= 1e-3);
  if (ref.residual <= 1e-6) {
    CHECK(ref.index_estimate >= 0);
    CHECK(ref.index_estimate <= 1);
  }
}

TEST_CASE("chain report on synthetic tables") {
  SpectrumTable good;
  for (int p = 1; p <= 6; ++p) {
    good.rows.push_back({p, 0.05, std::sqrt(static_cast<double>(p)),
                         std::sqrt(p + 0.5)});
  }
  ChainReport rep = chain_check(good, 0.05);
  CHECK(rep.all_ok);
  CHECK(rep.structural_ok);
  CHECK(rep.rows.size() == 5);

  SpectrumTable bad = good;
  bad.rows[0].c_tilde_value = 10.0;  // exceeds c(2) by far
  ChainReport rep2 = chain_check(bad, 0.05);
  CHECK_FALSE(rep2.all_ok);
  CHECK_FALSE(rep2.rows[0].upper_ok);
  CHECK(rep2.rows[0].lower_ok);

  SpectrumTable sparse;
  sparse.rows.push_back({1, 0.05, 1.0, 1.0});
  CHECK_THROWS_AS(chain_check(sparse, 0.05), std::invalid_argument);
}

TEST_CASE("weyl fit recovers exact and noisy power laws") {
  SpectrumTable exact;
  for (int p = 1; p <= 8; ++p) {
    exact.rows.push_back({p, 0.05, 0.0, 2.0 * std::sqrt(p)});
  }
  WeylFit fit = weyl_fit(exact, 1, 8);
  CHECK(fit.exponent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.prefactor == doctest::Approx(2.0).epsilon(1e-12));
  for (double r : fit.residuals) CHECK(std::abs(r) < 1e-12);

  SpectrumTable noisy;
  CounterRng rng(5);
  for (int p = 1; p <= 8; ++p) {
    const double jitter = 1.0 + 0.01 * (2.0 * rng.uniform(0, p) - 1.0);
    noisy.rows.push_back({p, 0.05, 0.0, 2.0 * std::sqrt(p) * jitter});
  }
  WeylFit nf = weyl_fit(noisy, 1, 8);
  CHECK(nf.exponent == doctest::Approx(0.5).epsilon(0.04));

  SpectrumTable bad;
  for (int p = 1; p <= 4; ++p) bad.rows.push_back({p, 0.05, 0.0, -1.0});
  CHECK_THROWS_AS(weyl_fit(bad, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(weyl_fit(exact, 1, 3), std::invalid_argument);
}
