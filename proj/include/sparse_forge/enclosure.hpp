#pragma once

#include "sparse_forge/rational.hpp"

#include <string>

namespace sparse_forge {

/// Closed rational interval [lo, hi] known to contain some real value.
struct Enclosure {
  Rational lo;
  Rational hi;

  static Enclosure point(const Rational& x) { return {x, x}; }

  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool is_point() const { return lo == hi; }
  bool intersects(const Enclosure& o) const { return !(hi < o.lo || o.hi < lo); }
  Rational midpoint() const { return (lo + hi) / 2; }

  friend bool operator==(const Enclosure&, const Enclosure&) = default;
};

/// Outward rounding of both ends to `bits` significant bits.
Enclosure round_out(const Enclosure& e, long bits);

/// Largest |q| accepted by the exp kernels before the caller must switch to
/// the tower domain.
inline constexpr long kExpArgCeiling = 1L << 16;

/// e^q with relative error about 2^-bits. Throws OVERFLOW past kExpArgCeiling.
Enclosure exp_enclosure_bits(const Rational& q, long bits);

/// e^q with hi - lo <= precision.
Enclosure exp_enclosure(const Rational& q, const Rational& precision);

/// Natural log of x > 0 with absolute error about 2^-bits.
Enclosure log_enclosure_bits(const Rational& x, long bits);

/// ln x with hi - lo <= precision.
Enclosure log_enclosure(const Rational& x, const Rational& precision);

/// ln 2, cached per precision.
Enclosure ln2_enclosure(long bits);

/// Serialized form {"lo":"p/q","hi":"p/q"}.
std::string to_json_text(const Enclosure& e);

/// Number of bits needed so that 2^-bits <= precision.
long bits_for(const Rational& precision);

}  // namespace sparse_forge
