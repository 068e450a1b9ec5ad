#pragma once

#include "sparse_forge/magnitudes.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sparse_forge {

/// (1/den) * sum_i coeffs[i] * r_i over the gap basis of `regime`.
/// Canonical: no trailing zero coefficients, den > 0, gcd(coeffs, den) = 1.
struct GapCombo {
  Regime regime = Regime::rational_fast;
  std::vector<std::int64_t> coeffs;
  Integer den = 1;

  friend bool operator==(const GapCombo&, const GapCombo&) = default;
};

/// Exact scalar: a rational, a gap-basis combination or a tower magnitude.
/// Combinations that only use r_0 = 1 collapse to rationals.
class Scalar {
 public:
  using Value = std::variant<Rational, GapCombo, TowerMag>;

  Scalar() : v_(Rational(0)) {}
  Scalar(const Rational& q);                // NOLINT(google-explicit-constructor)
  Scalar(long n) : Scalar(Rational(n)) {}   // NOLINT(google-explicit-constructor)
  Scalar(int n) : Scalar(Rational(n)) {}    // NOLINT(google-explicit-constructor)
  explicit Scalar(GapCombo c);
  /// Depth-0 towers collapse to the rational 1/top.
  explicit Scalar(TowerMag m);

  /// The unit combination r_k.
  static Scalar basis(Regime regime, std::size_t k);
  static Scalar combo(Regime regime, std::vector<std::int64_t> coeffs, Integer den = 1);

  const Value& value() const { return v_; }
  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  bool is_combo() const { return std::holds_alternative<GapCombo>(v_); }
  bool is_tower() const { return std::holds_alternative<TowerMag>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  const GapCombo& gap_combo() const { return std::get<GapCombo>(v_); }
  const TowerMag& tower() const { return std::get<TowerMag>(v_); }

  /// Certified value at the given working precision.
  CertReal to_cert(long bits) const;

  /// Exact rational value when it can be materialized within `max_bits`.
  std::optional<Rational> to_rational(std::size_t max_bits = 1u << 16) const;

  /// Bit-identical representation equality (not numeric equality).
  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  Value v_;
};

/// Combination view of s in `regime`: rationals use r_0, towers must be a
/// basis element. Throws INVALID_ARGUMENT otherwise.
GapCombo as_combo(const Scalar& s, Regime regime);

/// s as a tower magnitude: a tower scalar or a unit basis combination r_k
/// whose basis has a tower form.
std::optional<TowerMag> as_tower(const Scalar& s);

/// Total order on real values. Combination pairs use the leading-coefficient
/// rule when the tail is at most 8x the leading magnitude (sound because
/// 16 r_{k+1} <= r_k); everything else goes through certified refinement.
/// Throws INCOMPARABLE when the ceiling is reached.
Ordering scalar_compare(const Scalar& a, const Scalar& b, long ceiling_bits = kDefaultCeilingBits);

/// Sign of a combination (same rules as scalar_compare against zero).
int combo_sign(const GapCombo& c, long ceiling_bits = kDefaultCeilingBits);

inline bool scalar_less(const Scalar& a, const Scalar& b) { return scalar_compare(a, b) == Ordering::less; }
inline bool scalar_leq(const Scalar& a, const Scalar& b) { return scalar_compare(a, b) != Ordering::greater; }
inline bool scalar_eq(const Scalar& a, const Scalar& b) { return scalar_compare(a, b) == Ordering::equal; }

Scalar operator-(const Scalar& a);
Scalar operator+(const Scalar& a, const Scalar& b);
Scalar operator-(const Scalar& a, const Scalar& b);
/// Scaling by a rational factor.
Scalar operator*(const Rational& q, const Scalar& a);
Scalar operator/(const Scalar& a, const Rational& q);

/// "p/q", "combo[...]/den" or "1/exp_d(t)".
std::string to_string(const Scalar& s);

void to_json(nlohmann::json& j, const Scalar& s);
void from_json(const nlohmann::json& j, Scalar& s);

}  // namespace sparse_forge
