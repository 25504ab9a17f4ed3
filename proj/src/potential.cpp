#include "halfvol/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "halfvol/numerics.hpp"
#include "halfvol/rng.hpp"

namespace halfvol {

DoubleWellPotential::DoubleWellPotential(
    std::function<double(double)> w_fn, std::function<double(double)> w1_fn,
    std::function<double(double)> w2_fn, double alpha_in, double kappa_in,
    double beta_in, double q_in, double c1_in, double c2_in,
    std::vector<double> smooth_breakpoints)
    : w(std::move(w_fn)),
      w1(std::move(w1_fn)),
      w2(std::move(w2_fn)),
      alpha(alpha_in),
      kappa(kappa_in),
      beta(beta_in),
      q(q_in),
      c1(c1_in),
      c2(c2_in),
      kinks(std::move(smooth_breakpoints)) {
  const std::array<double, 2> splits{-1.0, 1.0};
  sigma = integrate_with_breakpoints(
      [this](double s) { return std::sqrt(std::max(w(s), 0.0) / 2.0); }, -1.0,
      1.0, splits, 1e-10);
}

DoubleWellPotential build_glued_quartic(double q, double beta) {
  if (!(q > 2.0 && q < 11.0 / 5.0)) {
    throw std::invalid_argument(
        "build_glued_quartic: exponent out of range, need 2 < q < 11/5");
  }
  if (!(beta > 1.0)) {
    throw std::invalid_argument("build_glued_quartic: need beta > 1");
  }

  // Quartic value and slope at the glue point.
  const double value = 0.25 * (1.0 - beta * beta) * (1.0 - beta * beta);
  const double slope = beta * (beta * beta - 1.0);

  // Tail c|x|^q + d matching value and first derivative at |x| = beta.
  const double c = slope / (q * std::pow(beta, q - 1.0));
  const double d = value - c * std::pow(beta, q);

  auto w = [beta, c, d, q](double x) {
    const double ax = std::abs(x);
    if (ax <= beta) {
      const double t = 1.0 - ax * ax;
      return 0.25 * t * t;
    }
    return c * std::pow(ax, q) + d;
  };
  auto w1 = [beta, c, q](double x) {
    const double ax = std::abs(x);
    const double sgn = x < 0.0 ? -1.0 : 1.0;
    if (ax <= beta) return sgn * ax * (ax * ax - 1.0);
    return sgn * c * q * std::pow(ax, q - 1.0);
  };
  auto w2 = [beta, c, q](double x) {
    const double ax = std::abs(x);
    if (ax <= beta) return 3.0 * ax * ax - 1.0;
    return c * q * (q - 1.0) * std::pow(ax, q - 2.0);
  };

  // Tail constants: w/|x|^q runs monotonically from w(beta)/beta^q to c
  // (d < 0 here), and |w'|/|x|^{q-1} = c q exactly.
  const double ratio_at_beta = value / std::pow(beta, q);
  const double lo = std::min({ratio_at_beta, c, c * q});
  const double hi = std::max({ratio_at_beta, c, c * q});
  const double c1 = 0.999 * lo;
  const double c2 = 1.001 * hi;

  const double alpha = 0.75;
  const double kappa = 3.0 * alpha * alpha - 1.0;

  return DoubleWellPotential(w, w1, w2, alpha, kappa, beta, q, c1, c2,
                             {-beta, beta});
}

namespace {

bool near_kink(const DoubleWellPotential& p, double x, double radius) {
  for (double k : p.kinks) {
    if (std::abs(x - k) < radius) return true;
  }
  return false;
}

void record(ConditionCheck& c, double violation) {
  if (violation > 0.0) {
    c.pass = false;
    c.worst_violation = std::max(c.worst_violation, violation);
  }
}

}  // namespace

PotentialReport verify_potential(const DoubleWellPotential& p, int n_samples,
                                 double x_max) {
  if (n_samples < 100) {
    throw std::invalid_argument("verify_potential: need n_samples >= 100");
  }
  if (!(x_max > p.beta)) {
    throw std::invalid_argument("verify_potential: need x_max > beta");
  }

  PotentialReport rep;
  rep.n_samples = n_samples;
  rep.x_max = x_max;

  // Symmetric grid; odd count so 0 is included and x -> -x maps samples to
  // samples exactly.
  const int n = (n_samples % 2 == 0) ? n_samples + 1 : n_samples;
  std::vector<double> xs(n);
  const int half = n / 2;
  for (int i = 0; i < n; ++i) {
    xs[i] = x_max * static_cast<double>(i - half) / static_cast<double>(half);
  }

  const double fd_h = 1e-6 * std::max(1.0, x_max / 10.0);

  for (int i = 0; i < n; ++i) {
    const double x = xs[i];
    const double wx = p.w(x);

    // (i) smooth and non-negative: non-negativity plus derivative
    // consistency by centered differences (skipped within 10h of a kink).
    record(rep.conditions[0], -wx);
    if (!near_kink(p, x, 10.0 * fd_h)) {
      const double fd1 = (p.w(x + fd_h) - p.w(x - fd_h)) / (2.0 * fd_h);
      const double scale1 = std::max({1.0, std::abs(p.w1(x)), std::abs(fd1)});
      record(rep.conditions[0], std::abs(fd1 - p.w1(x)) / scale1 - 1e-6);
      const double fd2 = (p.w1(x + fd_h) - p.w1(x - fd_h)) / (2.0 * fd_h);
      const double scale2 = std::max({1.0, std::abs(p.w2(x)), std::abs(fd2)});
      record(rep.conditions[0], std::abs(fd2 - p.w2(x)) / scale2 - 1e-6);
    }

    // (ii) evenness.
    record(rep.conditions[1],
           std::abs(wx - p.w(-x)) - 1e-12 * std::max(1.0, std::abs(wx)));

    // (iii) positive away from ±1 (the zeros themselves are checked below).
    if (std::abs(std::abs(x) - 1.0) >= 1e-9 && wx <= 0.0) {
      record(rep.conditions[2], -wx + 1e-15);
    }

    // (vi) convexity outside [-alpha, alpha].
    if (std::abs(x) >= p.alpha && !near_kink(p, x, 10.0 * fd_h)) {
      record(rep.conditions[5], p.kappa - p.w2(x) - 1e-9 * p.kappa);
    }

    // (vii) tail growth bounds.
    if (std::abs(x) >= p.beta && std::abs(x) > 0.0) {
      const double pw = std::pow(std::abs(x), p.q);
      const double pw1 = std::pow(std::abs(x), p.q - 1.0);
      record(rep.conditions[6], p.c1 * pw - wx);
      record(rep.conditions[6], wx - p.c2 * pw);
      record(rep.conditions[6], p.c1 * pw1 - std::abs(p.w1(x)));
      record(rep.conditions[6], std::abs(p.w1(x)) - p.c2 * pw1);
    }
  }

  // (iii) zeros exactly at ±1 with non-degenerate minima.
  record(rep.conditions[2], std::abs(p.w(1.0)) - 1e-12);
  record(rep.conditions[2], std::abs(p.w(-1.0)) - 1e-12);
  record(rep.conditions[2], -p.w2(1.0) + 1e-12);
  record(rep.conditions[2], -p.w2(-1.0) + 1e-12);

  // (iv) non-degenerate interior maximum.
  record(rep.conditions[3], -p.w(0.0) + 1e-15);
  record(rep.conditions[3], p.w2(0.0) + 1e-12);  // needs w2(0) < 0

  // (v) monotonicity pattern on consecutive samples per region.
  auto check_monotone = [&](double lo, double hi, double dir) {
    double prev_w = 0.0;
    bool have_prev = false;
    for (int i = 0; i < n; ++i) {
      const double x = xs[i];
      if (x <= lo || x >= hi) continue;
      if (have_prev) {
        const double dw = dir * (p.w(x) - prev_w);
        record(rep.conditions[4], -dw - 1e-12 * std::max(1.0, std::abs(prev_w)));
      }
      prev_w = p.w(x);
      have_prev = true;
    }
  };
  check_monotone(-1.0, 0.0, +1.0);          // increasing on (-1,0)
  check_monotone(1.0, x_max, +1.0);         // increasing on (1,inf)
  check_monotone(0.0, 1.0, -1.0);           // decreasing on (0,1)
  check_monotone(-x_max, -1.0, -1.0);       // decreasing on (-inf,-1)

  rep.pass = true;
  for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass;
  return rep;
}

std::string PotentialReport::summary() const {
  static const char* names[7] = {"smooth/nonneg", "even",      "zeros at ±1",
                                 "interior max",  "monotone",  "convex tails",
                                 "growth (q)"};
  std::ostringstream os;
  for (int i = 0; i < 7; ++i) {
    os << "(" << i + 1 << ") " << names[i] << ": "
       << (conditions[i].pass ? "pass" : "FAIL");
    if (!conditions[i].pass) {
      os << " (worst " << conditions[i].worst_violation << ")";
    }
    os << "\n";
  }
  os << "overall: " << (pass ? "pass" : "FAIL") << "\n";
  return os.str();
}

double sigma(const DoubleWellPotential& p) { return p.sigma; }

double phi_primitive(const DoubleWellPotential& p, double s) {
  return phi_between(p, 0.0, s);
}

double phi_between(const DoubleWellPotential& p, double x, double y) {
  if (x == y) return 0.0;
  std::vector<double> splits{-1.0, 1.0};
  splits.insert(splits.end(), p.kinks.begin(), p.kinks.end());
  return integrate_with_breakpoints(
      [&p](double s) { return std::sqrt(std::max(p.w(s), 0.0) / 2.0); }, x, y,
      splits, 1e-13 * std::max(1.0, std::abs(y - x)));
}

double phi_quadratic_constant(const DoubleWellPotential& p, int n_pairs,
                              double x_max) {
  if (n_pairs < 10000) {
    throw std::invalid_argument("phi_quadratic_constant: need n_pairs >= 1e4");
  }
  if (!(x_max >= p.beta)) {
    throw std::invalid_argument("phi_quadratic_constant: need x_max >= beta");
  }

  CounterRng rng(0x9d2c5680u);
  double worst = 0.0;
  const int anti_diag = n_pairs / 10;  // (t,-t) pairs probe the far wells
  for (int i = 0; i < n_pairs; ++i) {
    double x, y;
    if (i < anti_diag) {
      x = x_max * (static_cast<double>(i + 1) / anti_diag);
      y = -x;
    } else {
      x = x_max * (2.0 * rng.uniform(0, 2 * i) - 1.0);
      y = x_max * (2.0 * rng.uniform(0, 2 * i + 1) - 1.0);
    }
    if (std::abs(x - y) < 1e-6) continue;
    const double dphi = std::abs(phi_between(p, x, y));
    if (dphi == 0.0) {
      throw std::runtime_error(
          "phi_quadratic_constant: Phi not strictly monotone on sampled pair");
    }
    worst = std::max(worst, (x - y) * (x - y) / dphi);
  }
  return worst;
}

}  // namespace halfvol
