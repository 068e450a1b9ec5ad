#pragma once

#include "sparse_forge/cert_real.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sparse_forge {

/// Default refinement ceiling: enclosures are refined up to 2^-256.
inline constexpr long kDefaultCeilingBits = 256;

/// Runs make(bits) -> pair of CertReal at increasing precision until the
/// comparison is decided or `ceiling_bits` is exhausted.
template <class MakePair>
std::optional<Ordering> refine_compare(MakePair&& make, long ceiling_bits) {
  for (long bits = 64;; bits *= 2) {
    if (bits > ceiling_bits) bits = ceiling_bits;
    try {
      auto [a, b] = make(bits);
      return compare(a, b, bits);
    } catch (const Uncertain&) {
    }
    if (bits >= ceiling_bits) return std::nullopt;
  }
}

/// The number 1/exp_depth(top), exp_0 = identity.
struct TowerMag {
  long depth = 0;
  Rational top = 1;

  TowerMag() = default;
  TowerMag(long d, Rational t);

  CertReal to_cert(long bits) const;

  /// True when the value is certainly below 1, so psi acts as e^{-1/t}.
  bool below_one() const { return depth > 0 || top > 1; }

  friend bool operator==(const TowerMag&, const TowerMag&) = default;
};

std::string to_string(const TowerMag& m);

enum class MagOrdering { less, equal, greater, unknown };

std::string_view to_string(MagOrdering o) noexcept;

/// Compares 1/exp_da(ta) with 1/exp_db(tb). Same-top and same-depth pairs are
/// decided structurally; otherwise by certified enclosures refined up to
/// `ceiling_bits`. UNKNOWN only when the enclosures still overlap.
MagOrdering mag_compare(const TowerMag& a, const TowerMag& b, long ceiling_bits = kDefaultCeilingBits);

/// psi(t) = 0 at 0, e^{-1/t} on (0,1), t - 1 + e^{-1} on [1, inf).
CertReal psi(const CertReal& t, long bits);

/// l-th compositional iterate of psi, l >= 0.
CertReal psi_iter(const CertReal& t, long l, long bits);

/// psi_l applied to a tower magnitude below one: 1/exp_{d+l}(top), exactly.
TowerMag psi_iter(const TowerMag& t, long l);

struct PsiSpec {
  long l = 0;
};

/// Certified enclosure of psi_l(t), hi - lo <= precision. Negative l inverts
/// psi_{|l|} by certified bisection. Throws UNDERFLOW when the value is below
/// the plain range (use TowerMag comparisons instead).
Enclosure psi_iter_eval(PsiSpec spec, const Rational& t, const Rational& precision);

// ---------------------------------------------------------------------------
// Gap sequences

enum class Regime { rational_fast, tower_fast };

std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view text);

/// The sequence r_0 = 1 > r_1 > ... of a regime, with 16 r_{k+1} <= r_k.
class GapBasis {
 public:
  virtual ~GapBasis() = default;

  virtual Regime regime() const = 0;

  /// r_k as a certified real.
  virtual CertReal element(std::size_t k, long bits) const = 0;

  /// r_k exactly, if it is rational and fits in `max_bits`.
  virtual std::optional<Rational> exact_element(std::size_t k, std::size_t max_bits) const = 0;

  /// r_k as a tower magnitude, when the regime has one.
  virtual std::optional<TowerMag> tower_element(std::size_t k) const = 0;

  /// Every element satisfies 16 r_{k+1} <= r_k.
  static constexpr long kDomination = 16;
};

/// Shared immutable basis per regime. Elements are memoized on first use.
std::shared_ptr<const GapBasis> gap_basis(Regime regime);

/// Exponent e_k with r_k = 16^{-e_k} in the rational regime.
Integer rational_fast_exponent(std::size_t k);

// ---------------------------------------------------------------------------
// Configuration

struct MagnitudeConfig {
  Regime regime = Regime::rational_fast;
  long precision_ceiling_bits = kDefaultCeilingBits;
  int kmax = 10;
};

/// Accepts "2^-256" or a rational width in (0, 1) such as "1/1000".
long parse_precision_bits(std::string_view text);

/// Plain-text key=value lines; '#' starts a comment. Known keys: regime,
/// precision_ceiling, kmax. Unknown keys are returned to the caller.
MagnitudeConfig parse_magnitude_config(std::string_view text,
                                       std::vector<std::pair<std::string, std::string>>* rest = nullptr);

}  // namespace sparse_forge
