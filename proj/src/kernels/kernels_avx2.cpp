// Compiled with -mavx2; only reached through kernels::avx2() after a runtime
// CPU check.
#include <immintrin.h>

#include "toomlab/kernels.hpp"

namespace toomlab::kernels::detail {

namespace {

void combine_plus_sets(const std::uint64_t* const* shifted, const std::uint32_t* set_masks,
                       int nsets, std::size_t nwords, std::uint64_t* out) {
  std::size_t w = 0;
  const __m256i ones = _mm256_set1_epi64x(-1);
  for (; w + 4 <= nwords; w += 4) {
    __m256i acc = _mm256_setzero_si256();
    for (int k = 0; k < nsets; ++k) {
      __m256i all = ones;
      for (std::uint32_t m = set_masks[k]; m != 0; m &= m - 1) {
        const auto* src = reinterpret_cast<const __m256i*>(shifted[__builtin_ctz(m)] + w);
        all = _mm256_and_si256(all, _mm256_loadu_si256(src));
      }
      acc = _mm256_or_si256(acc, all);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + w), acc);
  }
  for (; w < nwords; ++w) {
    std::uint64_t acc = 0;
    for (int k = 0; k < nsets; ++k) {
      std::uint64_t all = ~std::uint64_t{0};
      for (std::uint32_t m = set_masks[k]; m != 0; m &= m - 1) all &= shifted[__builtin_ctz(m)][w];
      acc |= all;
    }
    out[w] = acc;
  }
}

// 32x32 -> 64 products of the eight lanes of `a` with the constant in `m`.
inline void mulhilo(__m256i a, __m256i m, __m256i& hi, __m256i& lo) {
  const __m256i even = _mm256_mul_epu32(a, m);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0b10101010);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0b10101010);
}

// Eight Philox blocks side by side, one block per 32-bit lane.
void philox8(const std::uint32_t key[2], __m256i& c0, __m256i& c1, __m256i& c2, __m256i& c3) {
  const __m256i m0 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul0));
  const __m256i m1 = _mm256_set1_epi32(static_cast<int>(Philox4x32::kMul1));
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < Philox4x32::kRounds; ++round) {
    if (round > 0) {
      k0 += Philox4x32::kWeyl0;
      k1 += Philox4x32::kWeyl1;
    }
    __m256i hi0, lo0, hi1, lo1;
    mulhilo(c0, m0, hi0, lo0);
    mulhilo(c2, m1, hi1, lo1);
    const __m256i n0 =
        _mm256_xor_si256(_mm256_xor_si256(hi1, c1), _mm256_set1_epi32(static_cast<int>(k0)));
    const __m256i n2 =
        _mm256_xor_si256(_mm256_xor_si256(hi0, c3), _mm256_set1_epi32(static_cast<int>(k1)));
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
  }
}

void philox_uniforms(RngKey key, std::uint64_t t, std::uint64_t first_block, std::size_t nblocks,
                     std::uint32_t* out) {
  const auto k = key.key();
  const std::uint32_t kk[2] = {k[0], k[1]};
  const __m256i t_lo = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(t)));
  const __m256i t_hi = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(t >> 32)));
  std::size_t b = 0;
  alignas(32) std::uint32_t lanes[4][8];
  for (; b + 8 <= nblocks; b += 8) {
    alignas(32) std::uint32_t lo[8], hi[8];
    for (int i = 0; i < 8; ++i) {
      const std::uint64_t blk = first_block + b + i;
      lo[i] = static_cast<std::uint32_t>(blk);
      hi[i] = static_cast<std::uint32_t>(blk >> 32);
    }
    __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
    __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
    __m256i c2 = t_lo, c3 = t_hi;
    philox8(kk, c0, c1, c2, c3);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes[0]), c0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes[1]), c1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes[2]), c2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes[3]), c3);
    std::uint32_t* dst = out + 4 * b;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j) dst[4 * i + j] = lanes[j][i];
  }
  for (; b < nblocks; ++b) {
    const auto r = Philox4x32::generate(key.block_counter(first_block + b, t), k);
    for (int j = 0; j < 4; ++j) out[4 * b + j] = r[j];
  }
}

std::uint64_t below_threshold(const std::uint32_t* u, int n, std::uint64_t threshold) {
  if (threshold == 0) return 0;
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  if (threshold > 0xFFFFFFFFull) return all;
  // unsigned u < thr  <=>  signed (thr ^ bias) > (u ^ bias)
  const __m256i bias = _mm256_set1_epi32(static_cast<int>(0x80000000u));
  const __m256i thr =
      _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(threshold) ^ 0x80000000u));
  std::uint64_t bits = 0;
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_xor_si256(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(u + i)), bias);
    const int m = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpgt_epi32(thr, v)));
    bits |= static_cast<std::uint64_t>(static_cast<unsigned>(m)) << i;
  }
  for (; i < n; ++i)
    if (u[i] < threshold) bits |= std::uint64_t{1} << i;
  return bits;
}

}  // namespace

const KernelSet& avx2_set() {
  static const KernelSet set{"avx2", combine_plus_sets, philox_uniforms, below_threshold};
  return set;
}

}  // namespace toomlab::kernels::detail
