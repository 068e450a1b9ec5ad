#pragma once

#include "sparse_forge/scalar.hpp"

#include <cstdint>
#include <vector>

namespace sparse_forge {

/// Closed interval [lo, hi], lo <= hi; degenerate points are allowed.
struct Interval {
  Scalar lo;
  Scalar hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, pairwise disjoint, non-touching closed intervals.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Trusts the caller that `sorted` is already normalized.
  static IntervalSet from_normalized(std::vector<Interval> sorted);

  const std::vector<Interval>& components() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> parts_;
};

/// Canonical union. Throws INVALID_ARGUMENT for lo > hi.
IntervalSet normalize(std::vector<Interval> intervals);

enum class SetOp { union_, intersect, complement_within };

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b);
/// Closure of box \ a, as closed intervals.
IntervalSet complement_within(const IntervalSet& a, const Interval& box);
/// a minus the union of the open interiors of `gaps`.
IntervalSet remove_open(const IntervalSet& a, const IntervalSet& gaps);

/// Dispatches to the operations above; `b` must have one component for
/// COMPLEMENT_WITHIN (the box).
IntervalSet set_algebra(SetOp op, const IntervalSet& a, const IntervalSet& b);

/// Minimal number of closed length-r intervals covering A (greedy sweep).
/// Empty A gives 0. Throws INVALID_ARGUMENT for r <= 0 and OVERFLOW when a
/// component needs more covers than fit in 64 bits.
std::uint64_t covering_number(const IntervalSet& a, const Scalar& r);

/// Smallest m >= 1 with start + m r >= end, for start <= end.
std::uint64_t count_covers(const Scalar& start, const Scalar& end, const Scalar& r);

void to_json(nlohmann::json& j, const IntervalSet& s);
void from_json(const nlohmann::json& j, IntervalSet& s);

}  // namespace sparse_forge
