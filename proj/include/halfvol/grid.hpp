#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace halfvol {

/// Periodic flat torus of dimension 1..3 with per-axis lengths and
/// power-of-two point counts. Cheap value type; fields carry a copy.
class TorusGrid {
 public:
  TorusGrid(std::vector<int> res, std::vector<double> sides);

  int dim() const { return dim_; }
  int res(int axis) const { return res_[axis]; }
  double side(int axis) const { return sides_[axis]; }
  double spacing(int axis) const { return sides_[axis] / res_[axis]; }

  std::size_t npoints() const { return npoints_; }
  double total_volume() const { return total_volume_; }
  double cell_volume() const { return cell_volume_; }
  double half_volume() const { return 0.5 * total_volume_; }

  /// Coordinates of grid point with flat (row-major, axis 0 slowest) index.
  std::array<double, 3> point(std::size_t flat) const;
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;

  bool operator==(const TorusGrid& o) const;
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }

 private:
  int dim_;
  std::array<int, 3> res_{1, 1, 1};
  std::array<double, 3> sides_{1.0, 1.0, 1.0};
  std::size_t npoints_;
  double total_volume_;
  double cell_volume_;
};

/// Real scalar field sampled on a torus grid (row-major values).
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& g)
      : grid_(g), values_(g.npoints(), 0.0) {}
  ScalarField(const TorusGrid& g, std::vector<double> v);

  const TorusGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Builds a field by evaluating f at every grid point.
ScalarField make_field(const TorusGrid& g,
                       const std::function<double(std::array<double, 3>)>& f);

double integrate(const ScalarField& u);
double l2_inner(const ScalarField& u, const ScalarField& v);
double mean(const ScalarField& u);
double l2_norm(const ScalarField& u);
double linf_norm(const ScalarField& u);

/// u += a*v (grids must match).
void axpy(ScalarField& u, double a, const ScalarField& v);
/// Subtracts the discrete mean in place.
void subtract_mean(ScalarField& u);

}  // namespace halfvol
