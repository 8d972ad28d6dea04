#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace ddos {

using rng_t = std::mt19937_64;

// Independent streams derived from one user seed, so that e.g. baseline
// generation and attack injection never share random draws.
namespace stream {
inline constexpr std::uint64_t baseline = 1;
inline constexpr std::uint64_t injection = 2;
inline constexpr std::uint64_t split = 3;
inline constexpr std::uint64_t smote = 4;
inline constexpr std::uint64_t kmeans = 5;
inline constexpr std::uint64_t mlp_init = 6;
inline constexpr std::uint64_t mlp_batches = 7;
inline constexpr std::uint64_t folds = 8;
}  // namespace stream

inline rng_t make_rng(std::uint64_t seed, std::uint64_t stream_id = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  return rng_t(seq);
}

/// 0..n-1 in seeded random order (Fisher-Yates driven by our own draws so the
/// permutation does not depend on the standard library's shuffle).
inline std::vector<std::size_t> shuffled_indices(std::size_t n, rng_t& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(idx[i - 1], idx[pick(rng)]);
  }
  return idx;
}

}  // namespace ddos
