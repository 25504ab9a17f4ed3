#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "halfvol/flow.hpp"
#include "halfvol/grid.hpp"
#include "halfvol/potential.hpp"
#include "halfvol/spectral.hpp"

namespace halfvol {

enum class ProfileKind { Tanh, Clamp };

/// Odd S^p-parameterized family of fields: slices are
/// profile(sum_i a_i phi_i / delta), mean-subtracted when constrained.
/// Oddness in the parameter is exact by construction, so the image is a
/// symmetric set; combined with non-degeneracy (no slice vanishes) this
/// certifies the family for the min-max classes.
struct SweepoutFamily {
  int p = 0;
  bool constrained = true;
  double delta = 0.25;
  ProfileKind profile = ProfileKind::Tanh;
  std::vector<ScalarField> modes;  // p+1 basis fields

  const TorusGrid& grid() const { return modes.at(0).grid(); }
};

/// Builds the family over the first p+1 basis modes (constrained) or the
/// constant plus the first p modes (unconstrained).
SweepoutFamily make_family(int p, bool constrained, const SpectralBasis& basis,
                           double delta, ProfileKind profile,
                           std::span<const int> mode_indices = {});

/// Slice at a unit parameter vector (throws unless | ||a||-1 | <= 1e-12).
/// Faults if the slice is degenerate (L2 norm < 1e-8).
ScalarField family_slice(const SweepoutFamily& fam, std::span<const double> a);

struct SphereSampler {
  int pairs = 100;      // antipodal pairs (canonical representatives)
  std::uint64_t seed = 0;
};

struct FamilyMax {
  double value = 0.0;          // normalized energy of the family max
  double runner_up = 0.0;      // second-best sampled value
  std::vector<double> argmax;  // canonical parameter of the max
  int argmax_index = -1;
  bool ascent_converged = true;
  double stationarity = 0.0;
  double min_slice_norm = 0.0;
};

/// Max of the normalized energy over the sampled half-sphere, polished by
/// projected gradient ascent. Requires pairs >= 100 * 2^p. Deterministic
/// for a fixed seed, including under n_threads > 1.
FamilyMax family_max(const SweepoutFamily& fam, double eps,
                     const DoubleWellPotential& pot,
                     const SphereSampler& sampler, int n_threads = 1);

struct SearchConfig {
  int delta_exp_min = -1;   // delta = min_side * 2^{-j}, j in [min,max]
  int delta_exp_max = 6;
  int mode_windows = 3;     // shifted starting offsets within the low modes
  int pairs_per_p = 100;    // final sampler pairs = pairs_per_p * 2^p
  double coarse_fraction = 0.125;
  std::uint64_t seed = 0;
  int threads = 1;
  ProfileKind profile = ProfileKind::Tanh;
};

struct WidthEstimate {
  int p = 0;
  double eps = 0.0;
  bool constrained = true;
  double value = 0.0;  // certified upper bound (a true family max)
  std::vector<double> argmax;
  SweepoutFamily family;
  std::string family_desc;
  double runner_up = 0.0;
  bool refined = false;
  double refined_value = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  int index_estimate = -1;
  std::uint64_t seed = 0;
};

/// Relaxed infimum over families: grid search over delta and shifted mode
/// windows (coarse sampling to prune, full sampling on the winners). The
/// returned value is the full-sampler max of an admissible family, hence a
/// sound upper bound for the width at (eps, p).
WidthEstimate optimize_family(int p, double eps, const DoubleWellPotential& pot,
                              bool constrained, const TorusGrid& grid,
                              const SearchConfig& search);

/// Opportunistic tightening: descend from the argmax slice and track the
/// family-max proxy max(runner_up, E(descended)); keeps the best-so-far so
/// refined_value <= value always. Reports lambda/residual/index of the
/// final field (index only when near-critical).
WidthEstimate refine_argmax(const WidthEstimate& est,
                            const DoubleWellPotential& pot,
                            const FlowConfig& cfg);

struct SpectrumRow {
  int p = 0;
  double eps = 0.0;
  double c_value = 0.0;        // unconstrained estimate
  double c_tilde_value = 0.0;  // mean-zero constrained estimate
};

struct SpectrumTable {
  std::vector<SpectrumRow> rows;
  std::string grid_desc;
  std::string potential_desc;
  std::uint64_t seed = 0;
};

struct ChainRow {
  int p = 0;
  double c_p = 0.0;
  double c_tilde_p = 0.0;
  double c_next = 0.0;
  double margin_lower = 0.0;  // c_tilde(p) + tol - c(p)
  double margin_upper = 0.0;  // c(p+1) + tol - c_tilde(p)
  bool lower_ok = true;       // structural: c(p) <= c_tilde(p) + tol
  bool upper_ok = true;
};

struct ChainReport {
  std::vector<ChainRow> rows;
  bool structural_ok = true;  // no lower-chain inversion beyond tol
  bool all_ok = true;
};

/// Checks c(eps,p) <= c~(eps,p) + tol_p and c~(eps,p) <= c(eps,p+1) + tol_p
/// with tol_p = tol_rel * c(eps,p+1). Throws if rows for p or p+1 are
/// missing.
ChainReport chain_check(const SpectrumTable& table, double tol_rel);

struct WeylFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  std::vector<double> residuals;  // per-point log residuals
};

/// Least squares fit of log c~ against log p over p in [p_min, p_max].
/// Needs >= 4 distinct p values with positive widths.
WeylFit weyl_fit(const SpectrumTable& table, int p_min, int p_max);

}  // namespace halfvol
