#include "sparse_forge/kernels.hpp"

#include <algorithm>
#include <cstdlib>

namespace sparse_forge {

namespace {

void sub_ref(const PackedCombo& a, const PackedCombo& b, PackedCombo& out) {
  for (int i = 0; i < PackedCombo::kWidth; ++i)
    out.c[i] = static_cast<std::int8_t>(static_cast<std::uint8_t>(a.c[i]) - static_cast<std::uint8_t>(b.c[i]));
}

void add_ref(const PackedCombo& a, const PackedCombo& b, PackedCombo& out) {
  for (int i = 0; i < PackedCombo::kWidth; ++i)
    out.c[i] = static_cast<std::int8_t>(static_cast<std::uint8_t>(a.c[i]) + static_cast<std::uint8_t>(b.c[i]));
}

PackedOrder compare_ref(const PackedCombo& a, const PackedCombo& b) {
  PackedCombo d;
  sub_ref(a, b, d);
  PackedOrder r;
  for (int i = 0; i < PackedCombo::kWidth; ++i) {
    const int v = d.c[i];
    if (r.sign == 0 && v != 0) r.sign = v > 0 ? 1 : -1;
    if (std::abs(v) > 8) r.decided = false;
  }
  return r;
}

int max_abs_ref(const PackedCombo& a) {
  int m = 0;
  for (auto v : a.c) m = std::max(m, std::abs(static_cast<int>(v)));
  return m;
}

constexpr ComboKernels kScalar{"scalar", sub_ref, add_ref, compare_ref, max_abs_ref};

}  // namespace

const ComboKernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace sparse_forge
