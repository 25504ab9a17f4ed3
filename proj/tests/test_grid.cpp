#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>

#include "halfvol/grid.hpp"
#include "halfvol/rng.hpp"
#include "halfvol/spectral.hpp"

using namespace halfvol;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField random_smooth(const TorusGrid& g, std::uint64_t seed) {
  CounterRng rng(seed);
  ScalarField u(g);
  SpectralBasis basis(g, std::min(12, 2 * g.res(0) - 4));
  for (int i = 0; i < basis.size(); ++i) {
    axpy(u, rng.normal(3, i, 0) / (1.0 + basis.eigenvalue(i)), basis.field(i));
  }
  return u;
}

}  // namespace

TEST_CASE("grid bookkeeping") {
  TorusGrid g({16, 16}, {1.0, 1.0});
  CHECK(g.npoints() == 256);
  CHECK(g.total_volume() == 1.0);
  CHECK(g.cell_volume() == 1.0 / 256);
  CHECK(g.cell_volume() * static_cast<double>(g.npoints()) ==
        g.total_volume());

  CHECK_THROWS_AS(TorusGrid({12}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid({16}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGrid({16, 16, 16, 16}, {1, 1, 1, 1}),
                  std::invalid_argument);
}

TEST_CASE("integration is exact for constants") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  ScalarField ones(g);
  for (double& v : ones.values()) v = 1.0;
  CHECK(integrate(ones) == g.total_volume());

  ScalarField threes(g);
  for (double& v : threes.values()) v = 3.0;
  CHECK(integrate(threes) == 3.0);
  CHECK(mean(threes) == 3.0);
}

TEST_CASE("orthonormality of the eigenbasis") {
  TorusGrid g({32, 32}, {1.0, 1.0});
  SpectralBasis basis(g, 10);
  for (int i = 0; i < basis.size(); ++i) {
    for (int j = i; j < basis.size(); ++j) {
      const double ip = l2_inner(basis.field(i), basis.field(j));
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    CHECK(std::abs(mean(basis.field(i))) < 1e-14);
  }
}

TEST_CASE("laplacian eigenvalue identity") {
  TorusGrid g({64}, {1.0});
  SpectralBasis basis(g, 6);
  for (int i = 0; i < basis.size(); ++i) {
    ScalarField phi = basis.field(i);
    ScalarField lap = laplacian(phi);
    const double mu = basis.eigenvalue(i);
    for (std::size_t p = 0; p < phi.size(); ++p) {
      CHECK(lap[p] == doctest::Approx(-mu * phi[p]).epsilon(1e-10));
    }
  }
}

TEST_CASE("laplacian kills constants and keeps zero mean") {
  TorusGrid g({32, 32}, {2.0, 1.0});
  ScalarField c(g);
  for (double& v : c.values()) v = 4.2;
  ScalarField lap = laplacian(c);
  CHECK(linf_norm(lap) < 1e-12);

  ScalarField u = random_smooth(g, 17);
  CHECK(std::abs(mean(laplacian(u))) <= 1e-12 * l2_norm(u));
}

TEST_CASE("laplacian is linear") {
  TorusGrid g({32}, {1.0});
  ScalarField u = random_smooth(g, 5);
  ScalarField v = random_smooth(g, 6);
  ScalarField sum(g);
  axpy(sum, 2.0, u);
  axpy(sum, -3.0, v);
  ScalarField lhs = laplacian(sum);
  ScalarField rhs(g);
  axpy(rhs, 2.0, laplacian(u));
  axpy(rhs, -3.0, laplacian(v));
  double scale = l2_norm(lhs) + 1.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12 * scale);
  }
}

TEST_CASE("poisson solve inverts the laplacian on cos modes") {
  TorusGrid g({128}, {1.0});
  ScalarField rhs = make_field(
      g, [](std::array<double, 3> x) { return std::cos(kTwoPi * x[0]); });
  ScalarField psi = poisson_solve(rhs);
  const double factor = 1.0 / (kTwoPi * kTwoPi);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(psi[i] == doctest::Approx(rhs[i] * factor).epsilon(1e-12));
  }
  CHECK(std::abs(mean(psi)) < 1e-14);

  // Residual identity: -lap(psi) = rhs.
  ScalarField back = laplacian(psi);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(-back[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
  }
}

TEST_CASE("poisson superposition of two modes") {
  TorusGrid g({64, 64}, {1.0, 2.0});
  ScalarField rhs = make_field(g, [](std::array<double, 3> x) {
    return 2.0 * std::cos(kTwoPi * x[0]) +
           0.5 * std::sin(2.0 * kTwoPi * x[1] / 2.0);
  });
  ScalarField psi = poisson_solve(rhs);
  const double mu1 = kTwoPi * kTwoPi;
  const double mu2 = std::pow(2.0 * kTwoPi / 2.0, 2);
  ScalarField expect = make_field(g, [&](std::array<double, 3> x) {
    return 2.0 * std::cos(kTwoPi * x[0]) / mu1 +
           0.5 * std::sin(2.0 * kTwoPi * x[1] / 2.0) / mu2;
  });
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(psi[i] == doctest::Approx(expect[i]).epsilon(1e-10));
  }
}

TEST_CASE("poisson rejects non-mean-zero input, accepts zero") {
  TorusGrid g({32}, {1.0});
  ScalarField bad(g);
  for (double& v : bad.values()) v = 1.0;
  CHECK_THROWS_AS(poisson_solve(bad), std::invalid_argument);

  ScalarField zero(g);
  ScalarField psi = poisson_solve(zero);
  CHECK(linf_norm(psi) == 0.0);
}

TEST_CASE("mollifier multiplier on a single mode") {
  TorusGrid g({64}, {1.0});
  ScalarField u = make_field(
      g, [](std::array<double, 3> x) { return std::cos(kTwoPi * 3 * x[0]); });
  const double eta = 0.05;
  const double mu = std::pow(kTwoPi * 3, 2);
  ScalarField s = mollify(u, eta);
  const double factor = std::exp(-mu * eta * eta);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i] == doctest::Approx(u[i] * factor).epsilon(1e-12));
  }
}

TEST_CASE("mollifier preserves mean, identity at eta zero") {
  TorusGrid g({32, 32}, {1.0, 1.5});
  ScalarField u = random_smooth(g, 23);
  for (double& v : u.values()) v += 0.7;

  ScalarField same = mollify(u, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(same[i] == u[i]);

  for (double eta : {0.01, 0.1, 1.0}) {
    ScalarField s = mollify(u, eta);
    CHECK(mean(s) == doctest::Approx(mean(u)).epsilon(1e-13));
    CHECK(linf_norm(s) <= linf_norm(u) * (1.0 + 1e-12));
  }

  ScalarField mz = random_smooth(g, 29);
  subtract_mean(mz);
  CHECK(std::abs(mean(mollify(mz, 0.2))) < 1e-13);
}

TEST_CASE("parseval identity") {
  TorusGrid g({64, 32}, {1.0, 1.0});
  ScalarField u = random_smooth(g, 31);
  CHECK(spectral_l2sq(u) == doctest::Approx(l2_inner(u, u)).epsilon(1e-10));
}

TEST_CASE("self-adjointness and dirichlet positivity") {
  TorusGrid g({32, 32}, {1.0, 2.0});
  ScalarField u = random_smooth(g, 41);
  ScalarField v = random_smooth(g, 43);
  const double a = l2_inner(laplacian(u), v);
  const double b = l2_inner(u, laplacian(v));
  CHECK(a == doctest::Approx(b).epsilon(1e-10));

  CHECK(-l2_inner(laplacian(u), u) >= 0.0);
  CHECK(dirichlet_form(u) ==
        doctest::Approx(-l2_inner(laplacian(u), u)).epsilon(1e-10));
}

TEST_CASE("gradient matches mode derivatives") {
  TorusGrid g({64, 64}, {1.0, 1.0});
  ScalarField u = make_field(g, [](std::array<double, 3> x) {
    return std::sin(kTwoPi * x[0]) * std::cos(2.0 * kTwoPi * x[1]);
  });
  auto grad = gradient(u);
  ScalarField dx = make_field(g, [](std::array<double, 3> x) {
    return kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(2.0 * kTwoPi * x[1]);
  });
  ScalarField dy = make_field(g, [](std::array<double, 3> x) {
    return -2.0 * kTwoPi * std::sin(kTwoPi * x[0]) *
           std::sin(2.0 * kTwoPi * x[1]);
  });
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(grad[0][i] == doctest::Approx(dx[i]).epsilon(1e-10));
    CHECK(grad[1][i] == doctest::Approx(dy[i]).epsilon(1e-10));
  }
}

TEST_CASE("field checkpoint invariants on 3d grids") {
  TorusGrid g({4, 8, 4}, {1.0, 2.0, 0.5});
  CHECK(g.npoints() == 128);
  CHECK(g.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
  ScalarField ones(g);
  for (double& v : ones.values()) v = 1.0;
  CHECK(integrate(ones) == doctest::Approx(g.total_volume()).epsilon(1e-15));
}
