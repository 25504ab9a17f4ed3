#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "halfvol/grid.hpp"
#include "halfvol/voxel.hpp"

namespace halfvol {

/// Binary field checkpoint: magic "HVF1", u32 dim, per-axis u32 counts,
/// per-axis f64 lengths, f64 eps, then row-major little-endian f64 values.
void write_hvf(const std::filesystem::path& path, const ScalarField& u,
               double eps);

struct HvfData {
  ScalarField field;
  double eps = 0.0;
};

HvfData read_hvf(const std::filesystem::path& path);

/// Voxel families: a one-line JSON header (dims, lengths, order name,
/// half volume, set count) followed by per-set run-length encoded
/// membership (u32 run count, then u32 runs alternating out/in, starting
/// outside).
void write_voxel_family(const std::filesystem::path& path,
                        const std::vector<VoxelSet>& sets,
                        const std::string& order_name);

struct VoxelFamilyData {
  std::vector<VoxelSet> sets;
  std::string order_name;
};

VoxelFamilyData read_voxel_family(const std::filesystem::path& path);

/// Writes content to a temporary sibling and renames it into place, so a
/// crash never leaves a partial file visible.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace halfvol
