#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "halfvol/grid.hpp"

namespace halfvol {

/// Binary set of grid cells on a torus (finite-perimeter set stand-in).
/// Volume is membership count times cell volume; the boundary is the mod-2
/// collection of faces between a member and a non-member cell.
class VoxelSet {
 public:
  explicit VoxelSet(const TorusGrid& g)
      : grid_(g), member_(g.npoints(), 0) {}

  static VoxelSet empty_set(const TorusGrid& g) { return VoxelSet(g); }
  static VoxelSet full_set(const TorusGrid& g);

  const TorusGrid& grid() const { return grid_; }
  bool contains(std::size_t cell) const { return member_[cell] != 0; }
  void set(std::size_t cell, bool in) { member_[cell] = in ? 1 : 0; }
  std::size_t count() const;
  double volume() const { return count() * grid_.cell_volume(); }

  VoxelSet complement() const;

  bool operator==(const VoxelSet& o) const {
    return grid_ == o.grid_ && member_ == o.member_;
  }

  std::span<const std::uint8_t> raw() const { return member_; }

 private:
  TorusGrid grid_;
  std::vector<std::uint8_t> member_;
};

/// Total boundary mass: face count between members and non-members times
/// per-face area (periodic neighbors; in 1D a face has measure 1).
double boundary_area(const VoxelSet& s);

/// Volume of the symmetric difference (the flat-topology proxy metric).
double symm_diff_volume(const VoxelSet& a, const VoxelSet& b);

/// Total order on cells standing in for a Morse sublevel filtration.
/// height: by axis-0 cell-center coordinate, flat-index tie-break.
/// lex: raster order with reversed axis precedence (last axis slowest),
/// so the two orders fill along different directions for dim >= 2.
class MorseOrder {
 public:
  enum class Kind { Height, Lex };

  MorseOrder(const TorusGrid& g, Kind kind);

  const TorusGrid& grid() const { return grid_; }
  Kind kind() const { return kind_; }
  std::string name() const;
  std::span<const std::uint32_t> cells() const { return cells_; }

  /// Prefix fill B_s: the first s cells of the order.
  VoxelSet prefix(std::size_t s) const;

 private:
  TorusGrid grid_;
  Kind kind_;
  std::vector<std::uint32_t> cells_;
};

/// Smallest prefix length s such that vol(S U B_s) >= vol(S) +
/// t*(half_volume - vol(S)); the overshoot is below one cell volume.
/// Requires vol(S) <= half_volume (callers handle larger sets through the
/// complement).
std::size_t select_s(const VoxelSet& s, double t, const MorseOrder& order);

/// Grows the set toward half volume by order-prefix cells
/// (vol(S) <= half required).
VoxelSet fill_toward_half(const VoxelSet& s, double t, const MorseOrder& order);

/// Odd extension of the fill to arbitrary sets: sets above half volume are
/// handled through the complement, so retract(complement) =
/// complement(retract) exactly.
VoxelSet retract_toward_half(const VoxelSet& s, double t,
                             const MorseOrder& order);

/// Action on a boundary through its representative of volume <= half
/// (ties resolved toward the representative containing the order's first
/// cell). Returns the filled representative; the boundary is complement-
/// invariant, so areas are well defined.
VoxelSet retract_cycle_toward_half(const VoxelSet& s, double t,
                                   const MorseOrder& order);

/// Max boundary area over all prefix fills of the order (exhaustive).
double level_area_K(const MorseOrder& order);

struct InflationCheck {
  double before = 0.0;
  double after = 0.0;
  double k_bound = 0.0;
  bool bound_ok = false;
};

/// Checks area(retract_cycle(S,t)) <= area(S) + K.
InflationCheck area_inflation_check(const VoxelSet& s, double t,
                                    const MorseOrder& order);

struct ContinuityCheck {
  double lhs = 0.0;  // vol(fill(S,t) symm-diff fill(T,r))
  double rhs = 0.0;  // 5*vol(S symm-diff T) + 2|t-r|*half + one cell
  bool ok = false;
};

/// Quantitative continuity of the fill in both arguments.
ContinuityCheck continuity_modulus_check(const VoxelSet& s, const VoxelSet& t_set,
                                         double t, double r,
                                         const MorseOrder& order);

/// Path of sets from the empty set to the full torus (or any supplied
/// family with consecutive members differing in at least one cell).
struct DiscreteSweepout {
  std::vector<VoxelSet> slices;
  double max_area = 0.0;

  static DiscreteSweepout single_cell_growth(const MorseOrder& order);
  void validate() const;  // endpoints + consecutive-difference invariant
};

struct RetractionReport {
  double input_max_area = 0.0;
  double output_max_area = 0.0;
  double k_bound = 0.0;
  bool area_bound_ok = false;        // output <= input + K
  bool half_volume_ok = false;       // every slice within one cell of half
  // The retracted family is itself an admissible input family, which
  // witnesses the reverse comparison between the two width notions.
  bool output_admissible = false;
};

/// Applies the cycle retraction at t = 1 to every slice.
std::pair<DiscreteSweepout, RetractionReport> retract_sweepout(
    const DiscreteSweepout& sw, const MorseOrder& order);

}  // namespace halfvol
