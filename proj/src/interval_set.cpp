#include "sparse_forge/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace sparse_forge {

IntervalSet IntervalSet::from_normalized(std::vector<Interval> sorted) {
  IntervalSet s;
  s.parts_ = std::move(sorted);
  return s;
}

IntervalSet normalize(std::vector<Interval> v) {
  for (const auto& iv : v)
    if (scalar_less(iv.hi, iv.lo))
      throw Error(ErrorCode::invalid_argument, "interval with lo > hi: [" + to_string(iv.lo) + "," + to_string(iv.hi) + "]");
  std::stable_sort(v.begin(), v.end(), [](const Interval& x, const Interval& y) { return scalar_less(x.lo, y.lo); });
  std::vector<Interval> out;
  out.reserve(v.size());
  for (auto& iv : v) {
    if (!out.empty() && scalar_leq(iv.lo, out.back().hi)) {
      if (scalar_less(out.back().hi, iv.hi)) out.back().hi = std::move(iv.hi);
    } else {
      out.push_back(std::move(iv));
    }
  }
  return IntervalSet::from_normalized(std::move(out));
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all = a.components();
  all.insert(all.end(), b.components().begin(), b.components().end());
  return normalize(std::move(all));
}

IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b) {
  const auto& x = a.components();
  const auto& y = b.components();
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const Scalar& lo = scalar_less(x[i].lo, y[j].lo) ? y[j].lo : x[i].lo;
    const bool x_first = scalar_less(x[i].hi, y[j].hi);
    const Scalar& hi = x_first ? x[i].hi : y[j].hi;
    if (scalar_leq(lo, hi)) out.push_back({lo, hi});
    if (x_first) ++i; else ++j;
  }
  // Touching pieces can only arise from point components; normalize merges them.
  return normalize(std::move(out));
}

IntervalSet complement_within(const IntervalSet& a, const Interval& box) {
  std::vector<Interval> out;
  Scalar cur = box.lo;
  for (const auto& c : a.components()) {
    if (!scalar_less(cur, box.hi)) break;
    if (scalar_less(cur, c.lo)) {
      const Scalar& end = scalar_less(c.lo, box.hi) ? c.lo : box.hi;
      out.push_back({cur, end});
    }
    if (scalar_less(cur, c.hi)) cur = c.hi;
  }
  if (scalar_less(cur, box.hi)) out.push_back({cur, box.hi});
  if (out.empty() && scalar_eq(box.lo, box.hi) && a.empty()) out.push_back(box);
  return normalize(std::move(out));
}

IntervalSet remove_open(const IntervalSet& a, const IntervalSet& gaps) {
  if (a.empty()) return a;
  const Interval box{a.components().front().lo, a.components().back().hi};
  return set_intersect(a, complement_within(gaps, box));
}

IntervalSet set_algebra(SetOp op, const IntervalSet& a, const IntervalSet& b) {
  switch (op) {
    case SetOp::union_: return set_union(a, b);
    case SetOp::intersect: return set_intersect(a, b);
    case SetOp::complement_within:
      if (b.size() != 1) throw Error(ErrorCode::invalid_argument, "complement box must be a single interval");
      return complement_within(a, b.components().front());
  }
  throw Error(ErrorCode::invalid_argument, "unknown set operation");
}

std::uint64_t count_covers(const Scalar& start, const Scalar& end, const Scalar& r) {
  if (!scalar_less(start, end)) return 1;
  if (!scalar_less(start + r, end)) return 1;
  // Estimate (end - start) / r, then verify the bracket exactly.
  const Scalar len = end - start;
  double est;
  if (auto l = len.to_rational(), q = r.to_rational(); l && q) {
    Rational ratio = *l / *q;
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
    if (!c.fits_ulong_p()) throw Error(ErrorCode::overflow, "cover count exceeds 64 bits");
    return c.get_ui();
  } else {
    const CertReal ratio = div(len.to_cert(128), r.to_cert(128), 128);
    if (!ratio.is_plain()) throw Error(ErrorCode::overflow, "cover count exceeds 64 bits");
    est = to_double(ratio.enclosure().midpoint());
  }
  if (!(est < 9.0e18)) throw Error(ErrorCode::overflow, "cover count exceeds 64 bits");
  std::uint64_t m = est < 1 ? 1 : static_cast<std::uint64_t>(std::ceil(est));
  auto reaches = [&](std::uint64_t k) { return scalar_leq(end, start + Rational(static_cast<unsigned long>(k)) * r); };
  while (m > 1 && reaches(m - 1)) --m;
  while (!reaches(m)) ++m;
  return m;
}

std::uint64_t covering_number(const IntervalSet& a, const Scalar& r) {
  if (scalar_compare(r, Scalar(0)) != Ordering::greater) throw Error(ErrorCode::invalid_argument, "covering radius must be > 0");
  std::uint64_t total = 0;
  std::optional<Scalar> reach;
  for (const auto& c : a.components()) {
    if (reach && scalar_leq(c.hi, *reach)) continue;
    const Scalar start = reach && scalar_leq(c.lo, *reach) ? *reach : c.lo;
    const std::uint64_t m = count_covers(start, c.hi, r);
    if (total + m < total) throw Error(ErrorCode::overflow, "covering number exceeds 64 bits");
    total += m;
    reach = start + Rational(static_cast<unsigned long>(m)) * r;
  }
  return total;
}

void to_json(nlohmann::json& j, const IntervalSet& s) {
  j = nlohmann::json::array();
  for (const auto& c : s.components()) j.push_back(nlohmann::json::array({c.lo, c.hi}));
}

void from_json(const nlohmann::json& j, IntervalSet& s) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "interval set must be a JSON array");
  std::vector<Interval> v;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::parse_error, "interval must be a [lo, hi] pair");
    v.push_back({p[0].get<Scalar>(), p[1].get<Scalar>()});
  }
  s = normalize(std::move(v));
}

}  // namespace sparse_forge
