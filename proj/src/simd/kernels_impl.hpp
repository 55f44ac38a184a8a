#pragma once

#include <cstddef>

#include "eqnorm/simd.hpp"

namespace eqnorm::simd {

// Leaf length of the pairwise reductions. Both variants split at the same
// points so that they differ only in how a leaf is accumulated.
inline constexpr std::size_t kLeaf = 32;
inline constexpr std::size_t kColumnLeaf = 4;

inline std::size_t split_point(std::size_t n) {
  // Keep the left half a multiple of 8 so vector leaves stay aligned in
  // element count.
  std::size_t half = n / 2;
  half -= half % 8;
  return half == 0 ? n / 2 : half;
}

#if defined(EQNORM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace eqnorm::simd
