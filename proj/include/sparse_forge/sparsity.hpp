#pragma once

#include "sparse_forge/cantor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sparse_forge {

enum class CoverMethod { greedy_exact, closed_form, bound };

std::string_view to_string(CoverMethod m) noexcept;

struct ProfileEntry {
  Scalar r;
  std::uint64_t n = 0;
  CoverMethod method = CoverMethod::greedy_exact;
};

/// Radii strictly decreasing, counts nondecreasing.
struct CoveringProfile {
  std::vector<ProfileEntry> entries;
};

/// Exact greedy N(A, r) per radius. Radii must be positive and strictly decreasing.
CoveringProfile covering_profile(const IntervalSet& a, const std::vector<Scalar>& radii);

/// Closed form for level K of a THEOREM_B system: N(E_K, r) = 2^{k+1} for
/// r in [r_{k+1}, r_k), k + 1 <= K, and N(E_K, r_k) = 2^k. `ks` selects
/// r = r_{k+1}. With `verify`, every entry is also computed greedily and a
/// mismatch throws.
CoveringProfile theorem_b_profile(const CantorSystem& sys, int K, const std::vector<int>& ks, bool verify);

/// Throws INVALID_ARGUMENT unless radii strictly decrease and counts do not.
void check_profile(const CoveringProfile& p);

struct DimensionEstimate {
  Rational slope;
  /// Every log value was rounded to within this width before the fit.
  Rational log_precision;
  std::size_t points = 0;
};

/// Least-squares slope of log N against log(1/r) over the whole profile.
/// Needs >= 3 entries; DEGENERATE when all radii give the same log(1/r).
/// The slope is a box-counting estimate, an upper-bound proxy for Hausdorff
/// dimension, never the limit itself.
DimensionEstimate box_dim_estimate(const CoveringProfile& p, long log_bits = 64);

/// Restricts a profile to entries [first, last] by index.
CoveringProfile window(const CoveringProfile& p, std::size_t first, std::size_t last);

enum class Verdict { pass, fail, unknown };

std::string_view to_string(Verdict v) noexcept;

struct NullEntry {
  int k = 0;
  Verdict verdict = Verdict::unknown;
  std::string lhs;  // r_{k+1} exp_m(2^{k+1})
  std::string rhs;  // r_k / psi_{m+1}(r_{k-1})
};

struct NullReport {
  std::string system;
  int m = 0;
  std::vector<NullEntry> entries;
  std::optional<int> first_failure;
  std::size_t unknown = 0;
  bool passed() const { return !first_failure && unknown == 0; }
};

/// Certifies r_{k+1} exp_m(2^{k+1}) <= r_k / psi_{m+1}(r_{k-1}) for k in
/// [k_lo, k_hi], k_lo >= 1, refining up to ceiling_bits.
NullReport null_diagnostic(const CantorSystem& sys, int m, int k_lo, int k_hi, long ceiling_bits = kDefaultCeilingBits);

/// Increasing homeomorphism of [0, inf) with phi(0) = 0.
struct Modulus {
  enum class Kind { identity, power, scale } kind = Kind::identity;
  long exponent = 1;   // power
  Rational factor = 1; // scale

  Scalar apply(const Scalar& r) const;
  std::string name() const;
};

/// Parses "identity", "pow:2", "scale:1/2".
Modulus parse_modulus(std::string_view text);

/// Upper-bound profile (phi(r), N) for images under maps with modulus phi.
CoveringProfile modulus_pushforward(const CoveringProfile& p, const Modulus& phi);

/// CSV with header "r,N,method".
std::string profile_csv(const CoveringProfile& p);
/// CSV with header "log_inv_r,log_N" (decimal approximations for plotting).
std::string profile_plot_csv(const CoveringProfile& p);

void to_json(nlohmann::json& j, const CoveringProfile& p);
void to_json(nlohmann::json& j, const NullReport& r);

}  // namespace sparse_forge
