#include "halfvol/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "halfvol/rng.hpp"

namespace halfvol {

namespace {

double profile_eval(ProfileKind k, double s) {
  const double as = std::abs(s);
  const double v = (k == ProfileKind::Tanh) ? std::tanh(as) : std::min(as, 1.0);
  return std::copysign(v, s);
}

double profile_slope(ProfileKind k, double s) {
  if (k == ProfileKind::Tanh) {
    const double t = std::tanh(s);
    return 1.0 - t * t;
  }
  return std::abs(s) < 1.0 ? 1.0 : 0.0;
}

void canonicalize(std::span<double> a) {
  int lead = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (std::abs(a[i]) > std::abs(a[lead])) lead = static_cast<int>(i);
  }
  if (a[lead] < 0.0) {
    for (double& x : a) x = -x;
  }
}

ScalarField combine_modes(const SweepoutFamily& fam,
                          std::span<const double> a) {
  ScalarField f(fam.grid());
  for (std::size_t i = 0; i < fam.modes.size(); ++i) {
    axpy(f, a[i], fam.modes[i]);
  }
  return f;
}

struct DegenerateSlice : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScalarField slice_impl(const SweepoutFamily& fam, std::span<const double> a) {
  ScalarField f = combine_modes(fam, a);
  const double inv_delta = 1.0 / fam.delta;
  for (double& v : f.values()) v = profile_eval(fam.profile, v * inv_delta);
  if (fam.constrained) subtract_mean(f);
  const double norm = l2_norm(f);
  if (norm < 1e-8) {
    std::ostringstream os;
    os << "family_slice: degenerate slice (norm " << norm << ") at a = [";
    for (std::size_t i = 0; i < a.size(); ++i) {
      os << (i ? "," : "") << a[i];
    }
    os << "]";
    throw DegenerateSlice(os.str());
  }
  return f;
}

void run_parallel(int n_threads, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n_threads <= 1 || count < 2) {
    body(0, count);
    return;
  }
  const int nt = std::min<std::size_t>(n_threads, count);
  std::vector<std::thread> workers;
  workers.reserve(nt);
  const std::size_t chunk = (count + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& w : workers) w.join();
}

FamilyMax family_max_impl(const SweepoutFamily& fam, double eps,
                          const DoubleWellPotential& pot,
                          const SphereSampler& sampler, int n_threads) {
  const int dim = fam.p + 1;
  const CounterRng rng(sampler.seed);
  const std::size_t count = static_cast<std::size_t>(sampler.pairs);

  std::vector<double> values(count);
  std::vector<double> norms(count);

  run_parallel(n_threads, count, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto a = rng.sphere_point(dim, 7, i);
      ScalarField u = slice_impl(fam, a);
      values[i] = energy(u, eps, pot).normalized;
      norms[i] = l2_norm(u);
    }
  });

  FamilyMax fm;
  fm.argmax_index = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (values[i] > values[fm.argmax_index]) {
      fm.argmax_index = static_cast<int>(i);
    }
  }
  fm.value = values[fm.argmax_index];
  fm.runner_up = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (static_cast<int>(i) != fm.argmax_index) {
      fm.runner_up = std::max(fm.runner_up, values[i]);
    }
  }
  fm.min_slice_norm = *std::min_element(norms.begin(), norms.end());
  fm.argmax = rng.sphere_point(dim, 7, fm.argmax_index);

  // Local ascent on the sphere from the best sample.
  std::vector<double> a = fm.argmax;
  const double two_sigma = 2.0 * pot.sigma;
  double val = fm.value;
  double step = 0.1;
  fm.ascent_converged = false;
  for (int it = 0; it < 100; ++it) {
    ScalarField u = slice_impl(fam, a);
    ScalarField f = combine_modes(fam, a);
    ScalarField fv = first_variation(u, eps, pot);
    if (fam.constrained) subtract_mean(fv);
    const double inv_delta = 1.0 / fam.delta;
    ScalarField weight(fam.grid());
    for (std::size_t i = 0; i < weight.size(); ++i) {
      weight[i] =
          fv[i] * profile_slope(fam.profile, f[i] * inv_delta) * inv_delta;
    }
    std::vector<double> grad(dim);
    double ga = 0.0;
    for (int i = 0; i < dim; ++i) {
      grad[i] = l2_inner(weight, fam.modes[i]) / two_sigma;
      ga += grad[i] * a[i];
    }
    double gtan_norm = 0.0;
    for (int i = 0; i < dim; ++i) {
      grad[i] -= ga * a[i];
      gtan_norm += grad[i] * grad[i];
    }
    gtan_norm = std::sqrt(gtan_norm);
    fm.stationarity = gtan_norm;
    if (gtan_norm <= 1e-8 * std::max(1.0, std::abs(val))) {
      fm.ascent_converged = true;
      break;
    }
    bool improved = false;
    while (step > 1e-12) {
      std::vector<double> cand(dim);
      double norm = 0.0;
      for (int i = 0; i < dim; ++i) {
        cand[i] = a[i] + step * grad[i];
        norm += cand[i] * cand[i];
      }
      norm = std::sqrt(norm);
      for (double& x : cand) x /= norm;
      const double cv =
          energy(slice_impl(fam, cand), eps, pot).normalized;
      if (cv > val) {
        a = std::move(cand);
        val = cv;
        step = std::min(step * 1.5, 1.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  if (val > fm.value) {
    fm.value = val;
    canonicalize(a);
    fm.argmax = a;
  }
  return fm;
}

}  // namespace

SweepoutFamily make_family(int p, bool constrained, const SpectralBasis& basis,
                           double delta, ProfileKind profile,
                           std::span<const int> mode_indices) {
  if (p < 0) throw std::invalid_argument("make_family: need p >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("make_family: delta > 0");

  SweepoutFamily fam;
  fam.p = p;
  fam.constrained = constrained;
  fam.delta = delta;
  fam.profile = profile;

  const int needed = constrained ? p + 1 : p;
  std::vector<int> idx(mode_indices.begin(), mode_indices.end());
  if (idx.empty()) {
    for (int i = 0; i < needed; ++i) idx.push_back(i);
  }
  if (static_cast<int>(idx.size()) != needed) {
    throw std::invalid_argument("make_family: wrong mode index count");
  }
  for (int i : idx) {
    if (i < 0 || i >= basis.size()) {
      throw std::invalid_argument("make_family: not enough basis modes");
    }
  }

  if (!constrained) {
    // Constant mode, unit L2 norm.
    ScalarField c(basis.grid());
    const double amp = 1.0 / std::sqrt(basis.grid().total_volume());
    for (double& v : c.values()) v = amp;
    fam.modes.push_back(std::move(c));
  }
  for (int i : idx) fam.modes.push_back(basis.field(i));
  return fam;
}

ScalarField family_slice(const SweepoutFamily& fam,
                         std::span<const double> a) {
  if (a.size() != fam.modes.size()) {
    throw std::invalid_argument("family_slice: parameter dimension mismatch");
  }
  double norm_sq = 0.0;
  for (double x : a) norm_sq += x * x;
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-12) {
    throw std::invalid_argument("family_slice: parameter must be unit length");
  }
  return slice_impl(fam, a);
}

FamilyMax family_max(const SweepoutFamily& fam, double eps,
                     const DoubleWellPotential& pot,
                     const SphereSampler& sampler, int n_threads) {
  const long required = 100L << fam.p;
  if (sampler.pairs < required) {
    std::ostringstream os;
    os << "family_max: need at least " << required
       << " antipodal pairs for p = " << fam.p;
    throw std::invalid_argument(os.str());
  }
  return family_max_impl(fam, eps, pot, sampler, n_threads);
}

WidthEstimate optimize_family(int p, double eps,
                              const DoubleWellPotential& pot, bool constrained,
                              const TorusGrid& grid,
                              const SearchConfig& search) {
  const int n_low = 2 * (p + 1);
  SpectralBasis basis(grid, n_low);

  double min_side = grid.side(0);
  for (int a = 1; a < grid.dim(); ++a) min_side = std::min(min_side, grid.side(a));

  struct Candidate {
    int window;
    double delta;
    double coarse_value = 0.0;
    bool valid = false;
  };
  std::vector<Candidate> cands;
  const int per_family = constrained ? p + 1 : p;
  const int max_window = std::max(0, n_low - per_family);
  const int n_windows = std::min(search.mode_windows, max_window + 1);
  for (int w = 0; w < n_windows; ++w) {
    for (int j = search.delta_exp_min; j <= search.delta_exp_max; ++j) {
      cands.push_back({w, min_side * std::pow(2.0, -j)});
    }
  }

  auto build = [&](const Candidate& c) {
    std::vector<int> idx(per_family);
    for (int i = 0; i < per_family; ++i) idx[i] = c.window + i;
    return make_family(p, constrained, basis, c.delta, search.profile, idx);
  };

  const int full_pairs = search.pairs_per_p << p;
  const int coarse_pairs = std::max(
      32, static_cast<int>(std::lround(full_pairs * search.coarse_fraction)));

  int n_valid = 0;
  for (auto& c : cands) {
    try {
      SweepoutFamily fam = build(c);
      FamilyMax fm = family_max_impl(fam, eps, pot,
                                     {coarse_pairs, search.seed},
                                     search.threads);
      c.coarse_value = fm.value;
      c.valid = true;
      ++n_valid;
    } catch (const DegenerateSlice&) {
      c.valid = false;
    }
  }
  if (n_valid == 0) {
    throw std::runtime_error(
        "optimize_family: all candidate families degenerate");
  }

  // Two best candidates by coarse value (ties: lowest candidate index).
  int best = -1, second = -1;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].valid) continue;
    if (best < 0 || cands[i].coarse_value < cands[best].coarse_value) {
      second = best;
      best = static_cast<int>(i);
    } else if (second < 0 ||
               cands[i].coarse_value < cands[second].coarse_value) {
      second = static_cast<int>(i);
    }
  }

  WidthEstimate est;
  est.p = p;
  est.eps = eps;
  est.constrained = constrained;
  est.seed = search.seed;
  est.value = 0.0;

  bool have = false;
  for (int pick : {best, second}) {
    if (pick < 0) continue;
    SweepoutFamily fam = build(cands[pick]);
    FamilyMax fm = family_max(fam, eps, pot, {full_pairs, search.seed},
                              search.threads);
    if (!have || fm.value < est.value) {
      est.value = fm.value;
      est.argmax = fm.argmax;
      est.runner_up = fm.runner_up;
      est.family = std::move(fam);
      std::ostringstream os;
      os << (constrained ? "constrained" : "free") << " p=" << p
         << " window=" << cands[pick].window << " delta=" << cands[pick].delta
         << " profile=" << (search.profile == ProfileKind::Tanh ? "tanh" : "clamp");
      est.family_desc = os.str();
      have = true;
    }
  }
  est.refined = false;
  est.refined_value = est.value;
  return est;
}

WidthEstimate refine_argmax(const WidthEstimate& est,
                            const DoubleWellPotential& pot,
                            const FlowConfig& cfg) {
  WidthEstimate out = est;
  const double eps = est.eps;
  ScalarField u = slice_impl(est.family, est.argmax);

  const double vol = u.grid().total_volume();
  const double tol = cfg.resolved_tol(vol);
  double tau = cfg.resolved_tau(eps);
  const double floor = est.runner_up;

  EnergyBreakdown e = energy(u, eps, pot);
  double proxy = std::min(est.value, std::max(floor, e.normalized));
  double res = 0.0;

  auto grad_norm = [&](const ScalarField& v) {
    if (est.constrained) return l2_norm(constrained_gradient(v, eps, pot));
    return l2_norm(first_variation(v, eps, pot));
  };

  res = grad_norm(u);
  long iter = 0;
  while (res > tol && iter < cfg.max_iters) {
    ScalarField cand =
        est.constrained
            ? flow_step(u, eps, pot, tau)
            : [&] {
                ScalarField rhs(u.grid());
                const auto uv = u.values();
                auto rv = rhs.values();
                for (std::size_t i = 0; i < rv.size(); ++i) {
                  rv[i] = uv[i] - tau * pot.w1(uv[i]) / eps;
                }
                return inverse_helmholtz(rhs, tau * eps);
              }();
    if (est.constrained) subtract_mean(cand);
    EnergyBreakdown ec = energy(cand, eps, pot);
    if (ec.total <= e.total) {
      u = std::move(cand);
      e = ec;
      res = grad_norm(u);
      proxy = std::min(proxy, std::max(floor, e.normalized));
      ++iter;
    } else {
      tau *= cfg.backtrack_factor;
      if (tau < cfg.min_tau) break;
    }
  }

  out.refined = true;
  out.refined_value = proxy;
  out.lambda = lagrange_multiplier(u, eps, pot);
  out.residual = res;
  out.index_estimate = -1;
  const bool near_critical = res <= 1e-6 * std::sqrt(vol);
  if (est.constrained && near_critical &&
      u.grid().npoints() <= cfg.index_max_points) {
    out.index_estimate =
        constrained_index(u, eps, pot, std::max(cfg.index_modes, est.p + 2))
            .negative_count;
  }
  return out;
}

ChainReport chain_check(const SpectrumTable& table, double tol_rel) {
  auto find_row = [&table](int p) -> const SpectrumRow* {
    for (const auto& r : table.rows) {
      if (r.p == p) return &r;
    }
    return nullptr;
  };

  ChainReport rep;
  for (const auto& r : table.rows) {
    const SpectrumRow* next = find_row(r.p + 1);
    if (next == nullptr) continue;
    ChainRow row;
    row.p = r.p;
    row.c_p = r.c_value;
    row.c_tilde_p = r.c_tilde_value;
    row.c_next = next->c_value;
    const double tol = tol_rel * next->c_value;
    row.margin_lower = r.c_tilde_value + tol - r.c_value;
    row.margin_upper = next->c_value + tol - r.c_tilde_value;
    row.lower_ok = row.margin_lower >= 0.0;
    row.upper_ok = row.margin_upper >= 0.0;
    rep.structural_ok = rep.structural_ok && row.lower_ok;
    rep.all_ok = rep.all_ok && row.lower_ok && row.upper_ok;
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) {
    throw std::invalid_argument("chain_check: no consecutive (p, p+1) rows");
  }
  return rep;
}

WeylFit weyl_fit(const SpectrumTable& table, int p_min, int p_max) {
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    if (r.p < p_min || r.p > p_max) continue;
    if (!(r.c_tilde_value > 0.0)) {
      throw std::invalid_argument("weyl_fit: non-positive width value");
    }
    xs.push_back(std::log(static_cast<double>(r.p)));
    ys.push_back(std::log(r.c_tilde_value));
  }
  if (xs.size() < 4) {
    throw std::invalid_argument("weyl_fit: need at least 4 distinct p values");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  WeylFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.residuals.push_back(ys[i] - (intercept + fit.exponent * xs[i]));
  }
  return fit;
}

}  // namespace halfvol
