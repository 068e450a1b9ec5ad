#include "sparse_forge/kernels.hpp"

#include <immintrin.h>

namespace sparse_forge::detail {

namespace {

__m256i load(const PackedCombo& a) { return _mm256_load_si256(reinterpret_cast<const __m256i*>(a.c)); }

void store(PackedCombo& out, __m256i v) { _mm256_store_si256(reinterpret_cast<__m256i*>(out.c), v); }

void sub_avx2(const PackedCombo& a, const PackedCombo& b, PackedCombo& out) {
  store(out, _mm256_sub_epi8(load(a), load(b)));
}

void add_avx2(const PackedCombo& a, const PackedCombo& b, PackedCombo& out) {
  store(out, _mm256_add_epi8(load(a), load(b)));
}

PackedOrder compare_avx2(const PackedCombo& a, const PackedCombo& b) {
  const __m256i d = _mm256_sub_epi8(load(a), load(b));
  const auto zero_mask = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(d, _mm256_setzero_si256())));
  // Unsigned |d| >= 9, so a wrapped -128 counts as large.
  const __m256i mag = _mm256_abs_epi8(d);
  const __m256i big = _mm256_cmpeq_epi8(_mm256_max_epu8(mag, _mm256_set1_epi8(9)), mag);
  PackedOrder r;
  r.decided = _mm256_movemask_epi8(big) == 0;
  const unsigned nonzero = ~zero_mask;
  if (nonzero != 0) {
    alignas(32) std::int8_t lanes[32];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), d);
    r.sign = lanes[__builtin_ctz(nonzero)] > 0 ? 1 : -1;
  }
  return r;
}

int max_abs_avx2(const PackedCombo& a) {
  // abs(-128) stays -128 as signed; use unsigned max so it reads as 128.
  __m256i v = _mm256_abs_epi8(load(a));
  __m128i m = _mm_max_epu8(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
  m = _mm_max_epu8(m, _mm_srli_si128(m, 8));
  m = _mm_max_epu8(m, _mm_srli_si128(m, 4));
  m = _mm_max_epu8(m, _mm_srli_si128(m, 2));
  m = _mm_max_epu8(m, _mm_srli_si128(m, 1));
  return _mm_cvtsi128_si32(m) & 0xff;
}

constexpr ComboKernels kAvx2{"avx2", sub_avx2, add_avx2, compare_avx2, max_abs_avx2};

}  // namespace

const ComboKernels* avx2_table() noexcept { return &kAvx2; }

}  // namespace sparse_forge::detail
