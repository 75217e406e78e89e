#pragma once

#include <cstdint>
#include <vector>

namespace posthoc {

/// xoshiro256** keyed by (seed, stream). Streams with different ids are
/// independent for practical purposes, so replicate r or permutation j can be
/// regenerated on its own without replaying the ones before it.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for an independent sub-experiment (domain) of stream `stream`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain);

/// Uniformly random permutation of {0, ..., n-1} (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace posthoc
