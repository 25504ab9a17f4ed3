#include "halfvol/rng.hpp"

#include <cmath>
#include <numbers>

namespace halfvol {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::word(std::uint64_t stream,
                               std::uint64_t counter) const {
  std::uint64_t x = splitmix64(seed_ ^ 0x6a09e667f3bcc909ULL);
  x = splitmix64(x ^ stream);
  return splitmix64(x ^ counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter,
                          int which) const {
  const double u1 = 1.0 - uniform(stream, 2 * counter);      // (0,1]
  const double u2 = uniform(stream, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return which == 0 ? r * std::cos(t) : r * std::sin(t);
}

std::vector<double> CounterRng::sphere_point(int dim, std::uint64_t stream,
                                             std::uint64_t index) const {
  std::vector<double> v(dim);
  std::uint64_t base = index;
  for (int attempt = 0; attempt < 64; ++attempt) {
    double norm_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = normal(stream, base * 64 + static_cast<std::uint64_t>(i),
                    static_cast<int>(index & 1));
      norm_sq += v[i] * v[i];
    }
    if (norm_sq > 1e-16) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (double& x : v) x *= inv;
      // Antipodal canonical form: leading largest-magnitude entry positive.
      int lead = 0;
      for (int i = 1; i < dim; ++i) {
        if (std::abs(v[i]) > std::abs(v[lead])) lead = i;
      }
      if (v[lead] < 0.0) {
        for (double& x : v) x = -x;
      }
      return v;
    }
    base += 0x100000001ULL;  // deterministic retry chain
  }
  v.assign(dim, 0.0);
  v[0] = 1.0;
  return v;
}

}  // namespace halfvol
