#pragma once

#include <cstdint>
#include <random>

namespace auxss {

using Rng = std::mt19937_64;

// Named substreams of a run's master seed. Each one is seeded from
// (master, stream, index) alone, so consuming one stream never shifts
// another.
enum class Stream : std::uint64_t {
  Env = 1,
  Sampler = 2,
  LearnerInit = 3,
  LearnerNoise = 4,
  LearnerUpdate = 5,
  Eval = 6,
  Demo = 7,
  Subset = 8,
  Safety = 9,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

inline Rng make_stream(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace auxss
