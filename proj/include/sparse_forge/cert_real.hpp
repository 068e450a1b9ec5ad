#pragma once

#include "sparse_forge/enclosure.hpp"
#include "sparse_forge/errors.hpp"

#include <memory>
#include <optional>
#include <string>

namespace sparse_forge {

enum class Ordering { less, equal, greater };

std::string_view to_string(Ordering o) noexcept;

/// A certified real that may be far outside any fixed exponent range.
///
/// Either a plain rational enclosure, or sign * exp(u) where u is itself a
/// CertReal with |u| > kTowerCut. The second form is how iterated-exponential
/// magnitudes such as 1/exp_5(16) are carried: exp(-exp(exp(exp(exp(16))))).
/// Plain enclosures stay within 2^+-kPlainBits in magnitude (or straddle 0).
class CertReal {
 public:
  static constexpr long kTowerCut = 4096;
  static constexpr long kPlainBits = 6000;
  // e^-kTowerCut < 2^-kTinyBits.
  static constexpr long kTinyBits = 5909;

  CertReal() : CertReal(Enclosure::point(0)) {}

  static CertReal exact(const Rational& x) { return from_enclosure(Enclosure::point(x), 0); }

  /// Normalizes an enclosure, switching to exp form when it is out of range.
  static CertReal from_enclosure(const Enclosure& e, long bits);

  bool is_plain() const { return exponent_ == nullptr; }
  const Enclosure& enclosure() const { return enc_; }

  /// Only for exp form.
  int outer_sign() const { return sign_; }
  const CertReal& exponent() const { return *exponent_; }

  /// Number of nested exp layers above the plain core.
  int height() const;

  /// Exp form with a positive exponent, i.e. |x| > e^kTowerCut.
  bool is_huge() const;
  /// Exp form with a negative exponent, i.e. |x| < e^-kTowerCut.
  bool is_tiny() const;

  /// Short human-readable rendering, e.g. "-exp(exp([8886110.52,8886110.53]))".
  std::string describe() const;

 private:
  explicit CertReal(Enclosure e) : enc_(std::move(e)) {}
  CertReal(int sign, std::shared_ptr<const CertReal> u) : sign_(sign), exponent_(std::move(u)) {}

  friend CertReal make_exp_form(int sign, CertReal u);

  Enclosure enc_;
  int sign_ = 1;
  std::shared_ptr<const CertReal> exponent_;
};

/// Sign of x, or Uncertain when an enclosure straddles zero.
int sign(const CertReal& x);

CertReal neg(const CertReal& x);
CertReal abs(const CertReal& x);
CertReal add(const CertReal& x, const CertReal& y, long bits);
CertReal sub(const CertReal& x, const CertReal& y, long bits);
CertReal mul(const CertReal& x, const CertReal& y, long bits);
CertReal div(const CertReal& x, const CertReal& y, long bits);
CertReal reciprocal(const CertReal& x, long bits);
CertReal exp(const CertReal& x, long bits);
CertReal log(const CertReal& x, long bits);

/// Ordering of x and y; throws Uncertain when the enclosures cannot decide.
Ordering compare(const CertReal& x, const CertReal& y, long bits);

/// compare() that reports nullopt instead of throwing.
std::optional<Ordering> try_compare(const CertReal& x, const CertReal& y, long bits);

/// A rational upper bound of |x|; throws Uncertain for huge values.
Rational abs_upper(const CertReal& x);

/// A rational enclosure, or UNDERFLOW / OVERFLOW when x is in exp form.
Enclosure to_enclosure(const CertReal& x);

}  // namespace sparse_forge
