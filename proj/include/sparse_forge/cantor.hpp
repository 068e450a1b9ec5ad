#pragma once

#include "sparse_forge/interval_set.hpp"

#include <memory>
#include <string>
#include <vector>

namespace sparse_forge {

enum class GapRule { theorem_b, middle_thirds, gap_encoded };

std::string_view to_string(GapRule r) noexcept;
/// Accepts "theorem-b", "middle-thirds", "gap-encoded" (underscores allowed).
GapRule parse_gap_rule(std::string_view text);

/// Deepest THEOREM_B level; endpoint combinations must fit a PackedCombo.
inline constexpr int kMaxCantorDepth = 30;

/// Left/right block choices, '0' = left.
using Address = std::string;

/// A Cantor-type construction with lazily built, cached level sets.
///
/// For THEOREM_B and MIDDLE_THIRDS, E_0 = [0,1] and
///   E_{k+1} = E_k \ U_c (c + r_{k+1}, c + r_k - r_{k+1})
/// over the left endpoints c of the components of E_k; the scales are the
/// regime's gap basis resp. 3^-k. GAP_ENCODED levels are gap_encoded_set at
/// that depth. Copies share the cache.
class CantorSystem {
 public:
  static CantorSystem theorem_b(Regime regime, int max_depth);
  static CantorSystem middle_thirds(int max_depth);
  static CantorSystem gap_encoded(std::vector<Rational> lengths, int max_depth);

  GapRule rule() const { return rule_; }
  Regime regime() const { return regime_; }
  int max_depth() const { return max_depth_; }
  const std::vector<Rational>& lengths() const { return lengths_; }
  std::string name() const;

  /// r_k: the component length at level k. Not defined for GAP_ENCODED.
  Scalar scale(int k) const;

  /// Throws DEPTH_EXCEEDED above max_depth.
  const IntervalSet& level_set(int k) const;

 private:
  struct Cache;
  CantorSystem(GapRule rule, Regime regime, int max_depth, std::vector<Rational> lengths);

  GapRule rule_;
  Regime regime_;
  int max_depth_;
  std::vector<Rational> lengths_;
  std::shared_ptr<Cache> cache_;
};

/// Component of level_set(len(addr)) reached by the block choices.
/// Throws DEPTH_EXCEEDED, or INVALID_ARGUMENT for GAP_ENCODED or bad digits.
Interval address_interval(const CantorSystem& sys, const Address& addr);

/// All distinct component endpoints of level K, ascending.
std::vector<Scalar> level_endpoints(const CantorSystem& sys, int k);

/// Closed set in [0,1] whose bounded gaps include gaps of exactly the given
/// lengths, left to right, separated by touching runs of scaled middle-thirds
/// blocks of the given depth. Separator gaps are shorter than every length.
/// Throws LENGTHS_NOT_SUMMABLE when the lengths sum to >= 1.
IntervalSet gap_encoded_set(const std::vector<Rational>& lengths, int depth);

/// Middle-thirds level `depth` scaled onto [lo, lo + len].
std::vector<Interval> scaled_middle_thirds(const Rational& lo, const Rational& len, int depth);

}  // namespace sparse_forge
