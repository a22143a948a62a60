#include "toomlab/kernels.hpp"

namespace toomlab::kernels {

namespace {

void combine_plus_sets(const std::uint64_t* const* shifted, const std::uint32_t* set_masks,
                       int nsets, std::size_t nwords, std::uint64_t* out) {
  for (std::size_t w = 0; w < nwords; ++w) {
    std::uint64_t acc = 0;
    for (int k = 0; k < nsets; ++k) {
      std::uint64_t all = ~std::uint64_t{0};
      for (std::uint32_t m = set_masks[k]; m != 0; m &= m - 1) all &= shifted[__builtin_ctz(m)][w];
      acc |= all;
    }
    out[w] = acc;
  }
}

void philox_uniforms(RngKey key, std::uint64_t t, std::uint64_t first_block, std::size_t nblocks,
                     std::uint32_t* out) {
  const auto k = key.key();
  for (std::size_t b = 0; b < nblocks; ++b) {
    const auto r = Philox4x32::generate(key.block_counter(first_block + b, t), k);
    for (int j = 0; j < 4; ++j) out[4 * b + j] = r[j];
  }
}

std::uint64_t below_threshold(const std::uint32_t* u, int n, std::uint64_t threshold) {
  std::uint64_t bits = 0;
  for (int i = 0; i < n; ++i)
    if (u[i] < threshold) bits |= std::uint64_t{1} << i;
  return bits;
}

}  // namespace

const KernelSet& scalar() {
  static const KernelSet set{"scalar", combine_plus_sets, philox_uniforms, below_threshold};
  return set;
}

}  // namespace toomlab::kernels
