#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toomlab/rng.hpp"

namespace toomlab::kernels {

// Data-parallel inner loops of the lattice engine. Every variant must be
// bit-for-bit equivalent to the scalar reference; tests/test_kernels.cpp
// checks each available variant against it.
struct KernelSet {
  const char* name;

  /// out[w] = OR over plus sets Z of AND over i in Z of shifted[i][w], where
  /// set_masks[k] is the bitmask of offset indices in the k-th plus set.
  void (*combine_plus_sets)(const std::uint64_t* const* shifted, const std::uint32_t* set_masks,
                            int nsets, std::size_t nwords, std::uint64_t* out);

  /// Writes the 4 * nblocks uniforms of Philox blocks [first_block,
  /// first_block + nblocks) at step t: out[4 * b + j] is lane j of block b.
  void (*philox_uniforms)(RngKey key, std::uint64_t t, std::uint64_t first_block,
                          std::size_t nblocks, std::uint32_t* out);

  /// Bit i set iff u[i] < threshold, for i < n <= 64; threshold in [0, 2^32].
  std::uint64_t (*below_threshold)(const std::uint32_t* u, int n, std::uint64_t threshold);
};

const KernelSet& scalar();

/// nullptr when the AVX2 variant was not built or the CPU lacks AVX2.
const KernelSet* avx2();

/// Best available variant, unless TOOMLAB_KERNELS=scalar|avx2 forces one.
const KernelSet& active();

std::vector<const KernelSet*> available();

}  // namespace toomlab::kernels
