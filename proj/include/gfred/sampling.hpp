#pragma once

#include <cstdint>
#include <vector>

#include "gfred/dataset.hpp"

namespace gfred {

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw c (c = 0, 1, ...) of stream s under seed is
///   mix64(key + c * 0x9E3779B97F4A7C15),  key = mix64(seed ^ mix64(s)).
/// Bounded integers use the high 64 bits of draw * bound.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed ^ mix64(stream))) {}

  std::uint64_t next() { return mix64(key_ + counter_++ * 0x9E3779B97F4A7C15ULL); }

  std::uint64_t uniform(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct SubsetSpec {
  int classes_to_pick = 4;
  int images_per_class = 35;
  std::uint64_t seed = 0;
};

struct Subset {
  Eigen::MatrixXd X;
  std::vector<int> labels;
  std::vector<Eigen::Index> indices;  // columns of the source data
};

/// Classes are drawn without replacement from the sorted labels that have at
/// least `images_per_class` images, then images without replacement within
/// each class (partial Fisher-Yates, stream = trial_index).
Subset sample_subset(const LabeledData& data, const SubsetSpec& spec, std::uint64_t trial_index);

}  // namespace gfred
