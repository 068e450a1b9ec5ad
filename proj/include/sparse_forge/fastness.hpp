#pragma once

#include "sparse_forge/sparsity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sparse_forge {

/// r_k of the regime. Rational regime: an exact rational while it fits in
/// 2^20 bits, otherwise the unit combination. Tower regime: a tower
/// magnitude (r_0 = 1, r_1 = 1/16 stay rational). Memoized by the basis.
Scalar fast_sequence(Regime regime, int k);

struct FastnessEntry {
  int k = 0;
  std::string condition;  // "psi", "domination" or "halving"
  Verdict verdict = Verdict::unknown;
};

struct FastnessReport {
  Regime regime = Regime::rational_fast;
  int j = 0;
  int k_max = 0;
  int k0 = 0;
  std::vector<FastnessEntry> entries;
  std::optional<FastnessEntry> first_failure;
  std::size_t unknown = 0;
  bool passed() const { return !first_failure && unknown == 0; }
};

/// r_{k+1} <= psi_j(r_k) for k0 = j <= k <= k_max, and 16 r_{k+1} <= r_k and
/// 2 r_{k+1} < r_k for k < k_max, each certified.
FastnessReport fastness_check(Regime regime, int j, int k_max, long ceiling_bits = kDefaultCeilingBits);

void to_json(nlohmann::json& j, const FastnessReport& r);

}  // namespace sparse_forge
