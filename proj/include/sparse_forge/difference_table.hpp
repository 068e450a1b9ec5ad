#pragma once

#include "sparse_forge/cantor.hpp"
#include "sparse_forge/kernels.hpp"

#include <optional>
#include <vector>

namespace sparse_forge {

/// Packs a gap combination (or an integer) with den 1 and |c| <= 127.
std::optional<PackedCombo> pack(const Scalar& s);
Scalar unpack(const PackedCombo& p, Regime regime);

/// Ascending distinct values with the pair of points each one came from.
/// When every value packs, comparisons run through the active SIMD kernels and
/// fall back to scalar_compare only when the leading-coefficient rule is not
/// certified for a pair.
class SortedValues {
 public:
  struct Origin {
    Scalar hi;  // value = hi - lo
    Scalar lo;
  };

  /// Distinct positive differences x - y of the given points.
  static SortedValues differences(const std::vector<Scalar>& points, Regime regime);
  /// Distinct positive points.
  static SortedValues positives(const std::vector<Scalar>& points, Regime regime);

  std::size_t size() const { return values_.size(); }
  const Scalar& value(std::size_t i) const { return values_[i]; }
  const Origin& origin(std::size_t i) const { return origins_[i]; }
  bool packed() const { return !packed_.empty(); }
  const ComboKernels& kernels() const { return *kernels_; }

  /// Ordering of value(i) against s.
  Ordering compare_to(std::size_t i, const Scalar& s) const;
  /// Whether 2 value(j) < value(i).
  bool twice_less(std::size_t j, std::size_t i) const;

  /// Number of leading values v with v < s (resp. v <= s).
  std::size_t count_less(const Scalar& s) const;
  std::size_t count_leq(const Scalar& s) const;
  /// Number of j with 2 value(j) < value(i).
  std::size_t count_half_below(std::size_t i) const;

 private:
  SortedValues(std::vector<Scalar> v, std::vector<Origin> o, Regime regime);

  Ordering packed_order(const PackedCombo& a, const PackedCombo& b) const;

  std::vector<Scalar> values_;
  std::vector<Origin> origins_;
  std::vector<PackedCombo> packed_;
  Regime regime_;
  const ComboKernels* kernels_;
};

}  // namespace sparse_forge
