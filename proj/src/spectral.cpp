#include "halfvol/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace halfvol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW plan creation is not thread safe; execution on private buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class SpectralEngine {
 public:
  explicit SpectralEngine(const TorusGrid& g) : grid_(g) {
    const int d = g.dim();
    int dims[3];
    for (int a = 0; a < d; ++a) dims[a] = g.res(a);
    n_ = g.npoints();
    half_last_ = g.res(d - 1) / 2 + 1;
    hs_ = n_ / static_cast<std::size_t>(g.res(d - 1)) *
          static_cast<std::size_t>(half_last_);

    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    cplx_ = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * hs_));
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      // FFTW_ESTIMATE keeps plan selection deterministic across runs.
      fwd_ = fftw_plan_dft_r2c(d, dims, real_, cplx_, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r(d, dims, cplx_, real_, FFTW_ESTIMATE);
    }

    // Precompute eigenvalues, Parseval weights, and per-axis frequencies
    // over the half spectrum.
    mu_.resize(hs_);
    weight_.resize(hs_);
    for (int a = 0; a < 3; ++a) freq_[a].assign(hs_, 0.0);
    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t h = 0; h < hs_; ++h) {
      std::size_t rem = h;
      for (int a = d - 1; a >= 0; --a) {
        const int extent = (a == d - 1) ? half_last_ : g.res(a);
        idx[a] = static_cast<int>(rem % extent);
        rem /= extent;
      }
      double mu = 0.0;
      for (int a = 0; a < d; ++a) {
        const int na = g.res(a);
        int f = idx[a];
        if (f > na / 2) f -= na;
        const double omega = kTwoPi * f / g.side(a);
        mu += omega * omega;
        // Derivative multiplier; Nyquist has no well-defined sign.
        freq_[a][h] = (f == na / 2 && na % 2 == 0) ? 0.0 : omega;
      }
      mu_[h] = mu;
      const int jl = idx[d - 1];
      weight_[h] = (jl == 0 || jl == g.res(d - 1) / 2) ? 1.0 : 2.0;
    }
  }

  ~SpectralEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  SpectralEngine(const SpectralEngine&) = delete;
  SpectralEngine& operator=(const SpectralEngine&) = delete;

  void forward(std::span<const double> in) {
    std::memcpy(real_, in.data(), sizeof(double) * n_);
    fftw_execute(fwd_);
  }

  void backward(std::span<double> out) {
    fftw_execute(bwd_);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * inv;
  }

  /// out = F^{-1}[ m(mu_k) * F[in] ].
  template <typename M>
  void apply_multiplier(std::span<const double> in, std::span<double> out,
                        M&& m) {
    forward(in);
    for (std::size_t h = 0; h < hs_; ++h) {
      const double s = m(mu_[h]);
      cplx_[h][0] *= s;
      cplx_[h][1] *= s;
    }
    backward(out);
  }

  /// Spectral derivative along one axis.
  void derivative(std::span<const double> in, std::span<double> out,
                  int axis) {
    forward(in);
    const auto& f = freq_[axis];
    for (std::size_t h = 0; h < hs_; ++h) {
      const double re = cplx_[h][0];
      const double im = cplx_[h][1];
      cplx_[h][0] = -f[h] * im;
      cplx_[h][1] = f[h] * re;
    }
    backward(out);
  }

  /// Sum of weight * g(mu_k) * |u_hat_k|^2 over the half spectrum.
  template <typename G>
  double weighted_power_sum(std::span<const double> in, G&& g) {
    forward(in);
    double s = 0.0;
    for (std::size_t h = 0; h < hs_; ++h) {
      const double p = cplx_[h][0] * cplx_[h][0] + cplx_[h][1] * cplx_[h][1];
      s += weight_[h] * g(mu_[h]) * p;
    }
    return s;
  }

  const TorusGrid& grid() const { return grid_; }
  std::size_t npoints() const { return n_; }

 private:
  TorusGrid grid_;
  std::size_t n_;
  std::size_t hs_;
  int half_last_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan bwd_;
  std::vector<double> mu_;
  std::vector<double> weight_;
  std::array<std::vector<double>, 3> freq_;
};

std::string grid_key(const TorusGrid& g) {
  std::ostringstream os;
  os << g.dim();
  for (int a = 0; a < g.dim(); ++a) {
    os << ':' << g.res(a) << ',' << std::hexfloat << g.side(a);
  }
  return os.str();
}

// One engine per (grid, thread): execution buffers are private, so
// concurrent work on distinct threads never shares state.
SpectralEngine& engine_for(const TorusGrid& g) {
  thread_local std::map<std::string, std::unique_ptr<SpectralEngine>> cache;
  auto key = grid_key(g);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<SpectralEngine>(g)).first;
  }
  return *it->second;
}

}  // namespace

ScalarField laplacian(const ScalarField& u) {
  ScalarField out(u.grid());
  engine_for(u.grid()).apply_multiplier(u.values(), out.values(),
                                        [](double mu) { return -mu; });
  return out;
}

ScalarField poisson_solve(const ScalarField& g) {
  const double m = mean(g);
  const double norm = l2_norm(g);
  if (std::abs(m) > 1e-10 * norm) {
    std::ostringstream os;
    os << "poisson_solve: right hand side has mean " << m
       << " (allowed " << 1e-10 * norm << ")";
    throw std::invalid_argument(os.str());
  }
  ScalarField out(g.grid());
  engine_for(g.grid()).apply_multiplier(
      g.values(), out.values(),
      [](double mu) { return mu > 0.0 ? 1.0 / mu : 0.0; });
  return out;
}

ScalarField mollify(const ScalarField& u, double eta) {
  if (eta < 0.0) throw std::invalid_argument("mollify: eta must be >= 0");
  if (eta == 0.0) return u;
  const double t = eta * eta;
  ScalarField out(u.grid());
  engine_for(u.grid()).apply_multiplier(
      u.values(), out.values(), [t](double mu) { return std::exp(-mu * t); });
  return out;
}

ScalarField inverse_helmholtz(const ScalarField& rhs, double nu) {
  if (nu < 0.0) {
    throw std::invalid_argument("inverse_helmholtz: nu must be >= 0");
  }
  ScalarField out(rhs.grid());
  engine_for(rhs.grid())
      .apply_multiplier(rhs.values(), out.values(),
                        [nu](double mu) { return 1.0 / (1.0 + nu * mu); });
  return out;
}

std::vector<ScalarField> gradient(const ScalarField& u) {
  std::vector<ScalarField> out;
  out.reserve(u.grid().dim());
  auto& eng = engine_for(u.grid());
  for (int a = 0; a < u.grid().dim(); ++a) {
    ScalarField da(u.grid());
    eng.derivative(u.values(), da.values(), a);
    out.push_back(std::move(da));
  }
  return out;
}

double dirichlet_form(const ScalarField& u) {
  const double quad = u.grid().cell_volume() /
                      static_cast<double>(u.grid().npoints());
  return quad * engine_for(u.grid()).weighted_power_sum(
                    u.values(), [](double mu) { return mu; });
}

double spectral_l2sq(const ScalarField& u) {
  const double quad = u.grid().cell_volume() /
                      static_cast<double>(u.grid().npoints());
  return quad * engine_for(u.grid()).weighted_power_sum(
                    u.values(), [](double) { return 1.0; });
}

SpectralBasis::SpectralBasis(const TorusGrid& g, int n_modes) : grid_(g) {
  // Canonical frequency vectors: first nonzero component positive, all
  // components strictly below Nyquist.
  std::vector<BasisMode> cand;
  const int d = g.dim();
  std::array<int, 3> kmax{0, 0, 0};
  for (int a = 0; a < d; ++a) kmax[a] = g.res(a) / 2 - 1;

  std::array<int, 3> k{0, 0, 0};
  std::function<void(int)> enumerate = [&](int axis) {
    if (axis == d) {
      bool all_zero = true;
      int first_nonzero = 0;
      for (int a = 0; a < d; ++a) {
        if (k[a] != 0) {
          all_zero = false;
          first_nonzero = k[a];
          break;
        }
      }
      if (all_zero || first_nonzero < 0) return;
      double mu = 0.0;
      for (int a = 0; a < d; ++a) {
        const double omega = kTwoPi * k[a] / g.side(a);
        mu += omega * omega;
      }
      cand.push_back({k, mu, false});
      cand.push_back({k, mu, true});
      return;
    }
    for (int v = -kmax[axis]; v <= kmax[axis]; ++v) {
      k[axis] = v;
      enumerate(axis + 1);
    }
    k[axis] = 0;
  };
  enumerate(0);

  std::sort(cand.begin(), cand.end(), [](const BasisMode& a,
                                         const BasisMode& b) {
    if (a.mu != b.mu) return a.mu < b.mu;
    if (a.k != b.k) return a.k < b.k;
    return a.is_sine < b.is_sine;
  });
  if (n_modes > static_cast<int>(cand.size())) {
    throw std::invalid_argument("SpectralBasis: grid too small for n_modes");
  }
  modes_.assign(cand.begin(), cand.begin() + n_modes);
}

ScalarField SpectralBasis::field(int i) const {
  const BasisMode& m = modes_[i];
  const double amp = std::sqrt(2.0 / grid_.total_volume());
  ScalarField u(grid_);
  for (std::size_t p = 0; p < grid_.npoints(); ++p) {
    const auto x = grid_.point(p);
    double phase = 0.0;
    for (int a = 0; a < grid_.dim(); ++a) {
      phase += kTwoPi * m.k[a] * x[a] / grid_.side(a);
    }
    u[p] = amp * (m.is_sine ? std::sin(phase) : std::cos(phase));
  }
  return u;
}

}  // namespace halfvol
