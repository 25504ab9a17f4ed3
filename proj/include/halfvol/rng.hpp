#pragma once

#include <cstdint>
#include <vector>

namespace halfvol {

/// Stateless counter-based generator. Every draw is a pure function of
/// (seed, stream, counter), so parallel consumers get identical numbers
/// regardless of execution order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr const char* kName = "splitmix64-counter";

  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0,1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const;

  /// Standard normal (Box-Muller; `which` selects the cos/sin branch).
  double normal(std::uint64_t stream, std::uint64_t counter, int which) const;

  /// Point on the unit sphere S^{dim-1}, canonicalized so the first
  /// component of largest magnitude is positive (antipodal representative).
  std::vector<double> sphere_point(int dim, std::uint64_t stream,
                                   std::uint64_t index) const;

 private:
  std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const;
  std::uint64_t seed_;
};

}  // namespace halfvol
