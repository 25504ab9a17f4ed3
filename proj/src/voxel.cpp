#include "halfvol/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace halfvol {

namespace {

// Area of one face orthogonal to `axis` (product of transverse spacings;
// 1 in one dimension).
double face_area(const TorusGrid& g, int axis) {
  double a = 1.0;
  for (int b = 0; b < g.dim(); ++b) {
    if (b != axis) a *= g.spacing(b);
  }
  return a;
}

std::size_t neighbor_up(const TorusGrid& g, std::size_t cell, int axis) {
  auto idx = g.unflatten(cell);
  idx[axis] = (idx[axis] + 1) % g.res(axis);
  return g.flatten(idx);
}

}  // namespace

VoxelSet VoxelSet::full_set(const TorusGrid& g) {
  VoxelSet s(g);
  for (std::size_t i = 0; i < g.npoints(); ++i) s.set(i, true);
  return s;
}

std::size_t VoxelSet::count() const {
  std::size_t c = 0;
  for (auto m : member_) c += m;
  return c;
}

VoxelSet VoxelSet::complement() const {
  VoxelSet s(grid_);
  for (std::size_t i = 0; i < member_.size(); ++i) {
    s.set(i, member_[i] == 0);
  }
  return s;
}

double boundary_area(const VoxelSet& s) {
  const TorusGrid& g = s.grid();
  double area = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double fa = face_area(g, axis);
    std::size_t faces = 0;
    for (std::size_t cell = 0; cell < g.npoints(); ++cell) {
      if (s.contains(cell) != s.contains(neighbor_up(g, cell, axis))) {
        ++faces;
      }
    }
    area += fa * static_cast<double>(faces);
  }
  return area;
}

double symm_diff_volume(const VoxelSet& a, const VoxelSet& b) {
  if (a.grid() != b.grid()) {
    throw std::invalid_argument("symm_diff_volume: grid mismatch");
  }
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.grid().npoints(); ++i) {
    if (a.contains(i) != b.contains(i)) ++c;
  }
  return c * a.grid().cell_volume();
}

MorseOrder::MorseOrder(const TorusGrid& g, Kind kind)
    : grid_(g), kind_(kind), cells_(g.npoints()) {
  std::iota(cells_.begin(), cells_.end(), 0u);
  if (kind == Kind::Height) {
    std::stable_sort(cells_.begin(), cells_.end(),
                     [&g](std::uint32_t a, std::uint32_t b) {
                       return g.unflatten(a)[0] < g.unflatten(b)[0];
                     });
  } else {
    std::sort(cells_.begin(), cells_.end(),
              [&g](std::uint32_t a, std::uint32_t b) {
                const auto ia = g.unflatten(a);
                const auto ib = g.unflatten(b);
                for (int axis = g.dim() - 1; axis >= 0; --axis) {
                  if (ia[axis] != ib[axis]) return ia[axis] < ib[axis];
                }
                return false;
              });
  }
}

std::string MorseOrder::name() const {
  return kind_ == Kind::Height ? "height" : "lex";
}

VoxelSet MorseOrder::prefix(std::size_t s) const {
  VoxelSet b(grid_);
  for (std::size_t i = 0; i < s; ++i) b.set(cells_[i], true);
  return b;
}

std::size_t select_s(const VoxelSet& s, double t, const MorseOrder& order) {
  if (s.grid() != order.grid()) {
    throw std::invalid_argument("select_s: grid mismatch");
  }
  if (t < 0.0 || t > 1.0) {
    throw std::invalid_argument("select_s: t must lie in [0,1]");
  }
  const std::size_t total = s.grid().npoints();
  const std::size_t half_cells = total / 2;
  const std::size_t have = s.count();
  if (have > half_cells) {
    throw std::invalid_argument(
        "select_s: set exceeds half volume (use the complement)");
  }
  // Work in cell counts: need the smallest prefix adding at least
  // t*(half - have) cells' worth of new volume.
  const double target = t * static_cast<double>(half_cells - have);
  const std::size_t needed =
      static_cast<std::size_t>(std::ceil(target - 1e-9));
  if (needed == 0) return 0;
  std::size_t added = 0;
  const auto cells = order.cells();
  for (std::size_t i = 0; i < total; ++i) {
    if (!s.contains(cells[i])) {
      ++added;
      if (added >= needed) return i + 1;
    }
  }
  return total;  // unreachable for t <= 1
}

VoxelSet fill_toward_half(const VoxelSet& s, double t,
                          const MorseOrder& order) {
  const std::size_t sel = select_s(s, t, order);
  VoxelSet out = s;
  const auto cells = order.cells();
  for (std::size_t i = 0; i < sel; ++i) out.set(cells[i], true);
  return out;
}

VoxelSet retract_toward_half(const VoxelSet& s, double t,
                             const MorseOrder& order) {
  const std::size_t half_cells = s.grid().npoints() / 2;
  if (s.count() <= half_cells) {
    return fill_toward_half(s, t, order);
  }
  return fill_toward_half(s.complement(), t, order).complement();
}

VoxelSet retract_cycle_toward_half(const VoxelSet& s, double t,
                                   const MorseOrder& order) {
  const std::size_t half_cells = s.grid().npoints() / 2;
  const std::size_t c = s.count();
  VoxelSet rep = s;
  if (c > half_cells) {
    rep = s.complement();
  } else if (c == half_cells) {
    // Tie: take the representative containing the order's first cell.
    if (!s.contains(order.cells()[0])) rep = s.complement();
  }
  return fill_toward_half(rep, t, order);
}

double level_area_K(const MorseOrder& order) {
  const TorusGrid& g = order.grid();
  const int d = g.dim();
  // Incremental per-axis face counts while adding cells in order. With
  // res == 2 the up and down neighbors coincide but the two faces are
  // distinct, so both are flipped.
  VoxelSet b(g);
  std::array<long, 3> faces{0, 0, 0};
  double k = 0.0;
  for (std::size_t cell : order.cells()) {
    for (int axis = 0; axis < d; ++axis) {
      const std::size_t up = neighbor_up(g, cell, axis);
      auto idx = g.unflatten(cell);
      idx[axis] = (idx[axis] + g.res(axis) - 1) % g.res(axis);
      const std::size_t down = g.flatten(idx);
      faces[axis] += b.contains(up) ? -1 : 1;
      faces[axis] += b.contains(down) ? -1 : 1;
    }
    b.set(cell, true);
    double area = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      area += face_area(g, axis) * static_cast<double>(faces[axis]);
    }
    k = std::max(k, area);
  }
  return k;
}

InflationCheck area_inflation_check(const VoxelSet& s, double t,
                                    const MorseOrder& order) {
  InflationCheck c;
  c.before = boundary_area(s);
  c.after = boundary_area(retract_cycle_toward_half(s, t, order));
  c.k_bound = level_area_K(order);
  c.bound_ok = c.after <= c.before + c.k_bound + 1e-12;
  return c;
}

ContinuityCheck continuity_modulus_check(const VoxelSet& s,
                                         const VoxelSet& t_set, double t,
                                         double r, const MorseOrder& order) {
  ContinuityCheck c;
  const VoxelSet a = fill_toward_half(s, t, order);
  const VoxelSet b = fill_toward_half(t_set, r, order);
  c.lhs = symm_diff_volume(a, b);
  c.rhs = 5.0 * symm_diff_volume(s, t_set) +
          2.0 * std::abs(t - r) * s.grid().half_volume() +
          s.grid().cell_volume();
  c.ok = c.lhs <= c.rhs + 1e-12;
  return c;
}

DiscreteSweepout DiscreteSweepout::single_cell_growth(
    const MorseOrder& order) {
  DiscreteSweepout sw;
  const std::size_t total = order.grid().npoints();
  sw.slices.reserve(total + 1);
  for (std::size_t s = 0; s <= total; ++s) {
    sw.slices.push_back(order.prefix(s));
  }
  sw.max_area = 0.0;
  for (const auto& sl : sw.slices) {
    sw.max_area = std::max(sw.max_area, boundary_area(sl));
  }
  return sw;
}

void DiscreteSweepout::validate() const {
  if (slices.size() < 2) {
    throw std::invalid_argument("DiscreteSweepout: need at least two slices");
  }
  const TorusGrid& g = slices.front().grid();
  if (slices.front().count() != 0 || slices.back().count() != g.npoints()) {
    throw std::invalid_argument(
        "DiscreteSweepout: endpoints must be the empty set and the full torus");
  }
  for (std::size_t i = 0; i + 1 < slices.size(); ++i) {
    if (symm_diff_volume(slices[i], slices[i + 1]) < g.cell_volume()) {
      throw std::invalid_argument(
          "DiscreteSweepout: consecutive slices must differ");
    }
  }
}

std::pair<DiscreteSweepout, RetractionReport> retract_sweepout(
    const DiscreteSweepout& sw, const MorseOrder& order) {
  sw.validate();
  DiscreteSweepout out;
  out.slices.reserve(sw.slices.size());

  RetractionReport rep;
  rep.k_bound = level_area_K(order);
  rep.half_volume_ok = true;

  const double half = order.grid().half_volume();
  const double cell = order.grid().cell_volume();

  double in_max = 0.0, out_max = 0.0;
  for (const auto& sl : sw.slices) {
    in_max = std::max(in_max, boundary_area(sl));
    VoxelSet r = retract_cycle_toward_half(sl, 1.0, order);
    out_max = std::max(out_max, boundary_area(r));
    if (std::abs(r.volume() - half) >= cell) rep.half_volume_ok = false;
    out.slices.push_back(std::move(r));
  }
  out.max_area = out_max;
  rep.input_max_area = in_max;
  rep.output_max_area = out_max;
  rep.area_bound_ok = out_max <= in_max + rep.k_bound + 1e-12;
  rep.output_admissible = true;
  return {std::move(out), rep};
}

}  // namespace halfvol
