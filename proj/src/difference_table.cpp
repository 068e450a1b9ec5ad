#include "sparse_forge/difference_table.hpp"

#include <algorithm>
#include <numeric>

namespace sparse_forge {

std::optional<PackedCombo> pack(const Scalar& s) {
  PackedCombo p;
  if (s.is_rational()) {
    const Rational& q = s.rational();
    if (q.get_den() != 1 || !q.get_num().fits_slong_p()) return std::nullopt;
    const long v = q.get_num().get_si();
    if (v < -127 || v > 127) return std::nullopt;
    p.c[0] = static_cast<std::int8_t>(v);
    return p;
  }
  if (!s.is_combo()) return std::nullopt;
  const GapCombo& c = s.gap_combo();
  if (c.den != 1 || c.coeffs.size() > PackedCombo::kWidth) return std::nullopt;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    if (c.coeffs[i] < -127 || c.coeffs[i] > 127) return std::nullopt;
    p.c[i] = static_cast<std::int8_t>(c.coeffs[i]);
  }
  return p;
}

Scalar unpack(const PackedCombo& p, Regime regime) {
  return Scalar::combo(regime, std::vector<std::int64_t>(std::begin(p.c), std::end(p.c)));
}

SortedValues::SortedValues(std::vector<Scalar> v, std::vector<Origin> o, Regime regime)
    : values_(std::move(v)), origins_(std::move(o)), regime_(regime), kernels_(&active_kernels()) {
  std::vector<PackedCombo> packed;
  packed.reserve(values_.size());
  for (const auto& s : values_) {
    auto p = pack(s);
    if (!p) {
      packed.clear();
      break;
    }
    packed.push_back(*p);
  }
  const bool use_packed = packed.size() == values_.size() && !values_.empty();

  std::vector<std::size_t> idx(values_.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto order = [&](std::size_t a, std::size_t b) {
    return use_packed ? packed_order(packed[a], packed[b]) : scalar_compare(values_[a], values_[b]);
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const Ordering o = order(a, b);
    return o == Ordering::less || (o == Ordering::equal && a < b);
  });

  std::vector<Scalar> vs;
  std::vector<Origin> os;
  std::vector<PackedCombo> ps;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && order(idx[i - 1], idx[i]) == Ordering::equal) continue;
    vs.push_back(values_[idx[i]]);
    os.push_back(origins_[idx[i]]);
    if (use_packed) ps.push_back(packed[idx[i]]);
  }
  values_ = std::move(vs);
  origins_ = std::move(os);
  packed_ = std::move(ps);
}

Ordering SortedValues::packed_order(const PackedCombo& a, const PackedCombo& b) const {
  const PackedOrder o = kernels_->compare(a, b);
  if (!o.decided) return scalar_compare(unpack(a, regime_), unpack(b, regime_));
  return o.sign < 0 ? Ordering::less : (o.sign > 0 ? Ordering::greater : Ordering::equal);
}

SortedValues SortedValues::differences(const std::vector<Scalar>& points, Regime regime) {
  std::vector<Scalar> sorted = points;
  std::sort(sorted.begin(), sorted.end(), scalar_less);
  std::vector<Scalar> vals;
  std::vector<Origin> origins;
  const std::size_t n = sorted.size();
  vals.reserve(n * (n - (n > 0)) / 2);
  origins.reserve(vals.capacity());

  std::vector<PackedCombo> pk;
  for (const auto& s : sorted) {
    auto p = pack(s);
    if (!p) break;
    pk.push_back(*p);
  }
  const ComboKernels& kern = active_kernels();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (pk.size() == n) {
        PackedCombo d;
        kern.sub(pk[i], pk[j], d);
        if (kern.max_abs(d) < 127 && kern.max_abs(pk[i]) < 64 && kern.max_abs(pk[j]) < 64) {
          if (d == PackedCombo{}) continue;
          vals.push_back(unpack(d, regime));
          origins.push_back({sorted[i], sorted[j]});
          continue;
        }
      }
      Scalar d = sorted[i] - sorted[j];
      if (scalar_compare(d, Scalar(0)) != Ordering::greater) continue;
      vals.push_back(std::move(d));
      origins.push_back({sorted[i], sorted[j]});
    }
  }
  return SortedValues(std::move(vals), std::move(origins), regime);
}

SortedValues SortedValues::positives(const std::vector<Scalar>& points, Regime regime) {
  std::vector<Scalar> vals;
  std::vector<Origin> origins;
  for (const auto& p : points) {
    if (scalar_compare(p, Scalar(0)) != Ordering::greater) continue;
    vals.push_back(p);
    origins.push_back({p, Scalar(0)});
  }
  return SortedValues(std::move(vals), std::move(origins), regime);
}

Ordering SortedValues::compare_to(std::size_t i, const Scalar& s) const {
  if (packed()) {
    if (auto p = pack(s)) return packed_order(packed_[i], *p);
  }
  return scalar_compare(values_[i], s);
}

bool SortedValues::twice_less(std::size_t j, std::size_t i) const {
  if (packed()) {
    PackedCombo d;
    kernels_->add(packed_[j], packed_[j], d);
    if (kernels_->max_abs(packed_[j]) < 64) return packed_order(d, packed_[i]) == Ordering::less;
  }
  return scalar_less(Rational(2) * values_[j], values_[i]);
}

std::size_t SortedValues::count_less(const Scalar& s) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (compare_to(mid, s) == Ordering::less) lo = mid + 1; else hi = mid;
  }
  return lo;
}

std::size_t SortedValues::count_leq(const Scalar& s) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (compare_to(mid, s) != Ordering::greater) lo = mid + 1; else hi = mid;
  }
  return lo;
}

std::size_t SortedValues::count_half_below(std::size_t i) const {
  std::size_t lo = 0, hi = i;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (twice_less(mid, i)) lo = mid + 1; else hi = mid;
  }
  return lo;
}

}  // namespace sparse_forge
