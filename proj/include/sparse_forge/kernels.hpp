#pragma once

#include <cstdint>
#include <string_view>

namespace sparse_forge {

/// Integer coefficients over r_0..r_31, one byte each.
struct alignas(32) PackedCombo {
  static constexpr int kWidth = 32;
  std::int8_t c[kWidth] = {};

  friend bool operator==(const PackedCombo&, const PackedCombo&) = default;
};

/// Sign of a - b by the leading-coefficient rule. `decided` is false when some
/// coefficient of a - b exceeds 8 in magnitude, i.e. the rule is not certified.
struct PackedOrder {
  int sign = 0;
  bool decided = true;
};

/// Kernel table; every implementation must agree bit-for-bit with the scalar one.
struct ComboKernels {
  std::string_view name;
  /// out = a - b, wrapping on int8 overflow (callers keep |coefficients| small).
  void (*sub)(const PackedCombo& a, const PackedCombo& b, PackedCombo& out);
  void (*add)(const PackedCombo& a, const PackedCombo& b, PackedCombo& out);
  PackedOrder (*compare)(const PackedCombo& a, const PackedCombo& b);
  /// Largest |coefficient|.
  int (*max_abs)(const PackedCombo& a);
};

const ComboKernels& scalar_kernels() noexcept;

/// Null when the CPU lacks AVX2 or the build did not include it.
const ComboKernels* avx2_kernels() noexcept;

/// Best available table. SPARSE_FORGE_KERNELS=scalar forces the reference.
const ComboKernels& active_kernels() noexcept;

}  // namespace sparse_forge
