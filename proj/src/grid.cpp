#include "halfvol/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "halfvol/numerics.hpp"

namespace halfvol {

TorusGrid::TorusGrid(std::vector<int> res, std::vector<double> sides) {
  if (res.empty() || res.size() > 3 || res.size() != sides.size()) {
    throw std::invalid_argument("TorusGrid: need 1..3 matching axes");
  }
  dim_ = static_cast<int>(res.size());
  npoints_ = 1;
  total_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    if (!is_power_of_two(res[a]) || res[a] < 2) {
      throw std::invalid_argument(
          "TorusGrid: per-axis resolution must be a power of two >= 2");
    }
    if (!(sides[a] > 0.0)) {
      throw std::invalid_argument("TorusGrid: side lengths must be positive");
    }
    res_[a] = res[a];
    sides_[a] = sides[a];
    npoints_ *= static_cast<std::size_t>(res[a]);
    total_volume_ *= sides[a];
  }
  // npoints is a power of two, so this division is exact.
  cell_volume_ = total_volume_ / static_cast<double>(npoints_);
}

std::array<double, 3> TorusGrid::point(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = idx[a] * spacing(a);
  return x;
}

std::array<int, 3> TorusGrid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % res_[a]);
    flat /= res_[a];
  }
  return idx;
}

std::size_t TorusGrid::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    flat = flat * res_[a] + static_cast<std::size_t>(idx[a]);
  }
  return flat;
}

bool TorusGrid::operator==(const TorusGrid& o) const {
  if (dim_ != o.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (res_[a] != o.res_[a] || sides_[a] != o.sides_[a]) return false;
  }
  return true;
}

ScalarField::ScalarField(const TorusGrid& g, std::vector<double> v)
    : grid_(g), values_(std::move(v)) {
  if (values_.size() != grid_.npoints()) {
    throw std::invalid_argument("ScalarField: value count mismatch");
  }
}

ScalarField make_field(const TorusGrid& g,
                       const std::function<double(std::array<double, 3>)>& f) {
  ScalarField u(g);
  for (std::size_t i = 0; i < g.npoints(); ++i) u[i] = f(g.point(i));
  return u;
}

double integrate(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.grid().cell_volume();
}

double l2_inner(const ScalarField& u, const ScalarField& v) {
  if (u.grid() != v.grid()) {
    throw std::invalid_argument("l2_inner: grid mismatch");
  }
  double s = 0.0;
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * u.grid().cell_volume();
}

double mean(const ScalarField& u) {
  return integrate(u) / u.grid().total_volume();
}

double l2_norm(const ScalarField& u) { return std::sqrt(l2_inner(u, u)); }

double linf_norm(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

void axpy(ScalarField& u, double a, const ScalarField& v) {
  if (u.grid() != v.grid()) {
    throw std::invalid_argument("axpy: grid mismatch");
  }
  auto x = u.values();
  const auto y = v.values();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
}

void subtract_mean(ScalarField& u) {
  const double m = mean(u);
  for (double& v : u.values()) v -= m;
}

}  // namespace halfvol
