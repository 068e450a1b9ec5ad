#include "sparse_forge/cert_real.hpp"

#include <algorithm>

namespace sparse_forge {

std::string_view to_string(Ordering o) noexcept {
  switch (o) {
    case Ordering::less: return "LT";
    case Ordering::equal: return "EQ";
    case Ordering::greater: return "GT";
  }
  return "?";
}

namespace {

const Rational& plain_limit() {
  static const Rational v = pow2(CertReal::kPlainBits);
  return v;
}

const Rational& plain_floor() {
  static const Rational v = pow2(-CertReal::kPlainBits);
  return v;
}

const Rational& tiny_bound() {
  static const Rational v = pow2(-CertReal::kTinyBits);
  return v;
}

Rational abs_max(const Enclosure& e) { return std::max(abs(e.lo), abs(e.hi)); }

Enclosure plain_log(const Enclosure& e, long bits) {
  if (e.lo <= 0) throw Uncertain("log of enclosure touching zero");
  Enclosure a = log_enclosure_bits(e.lo, bits);
  if (e.is_point()) return a;
  Enclosure b = log_enclosure_bits(e.hi, bits);
  return {a.lo, b.hi};
}

Enclosure plain_exp(const Enclosure& e, long bits) {
  Enclosure a = exp_enclosure_bits(e.lo, bits);
  if (e.is_point()) return a;
  Enclosure b = exp_enclosure_bits(e.hi, bits);
  return {a.lo, b.hi};
}

}  // namespace

CertReal make_exp_form(int sign, CertReal u) {
  return CertReal(sign, std::make_shared<const CertReal>(std::move(u)));
}

CertReal CertReal::from_enclosure(const Enclosure& e, long bits) {
  Enclosure r = bits > 0 ? round_out(e, bits) : e;
  const int s = r.lo > 0 ? 1 : (r.hi < 0 ? -1 : 0);
  if (s != 0) {
    Enclosure m = s > 0 ? r : Enclosure{-r.hi, -r.lo};
    if (m.lo > plain_limit() || m.hi < plain_floor()) {
      long lb = bits > 0 ? bits : 256;
      return make_exp_form(s, CertReal(plain_log(m, lb)));
    }
  }
  return CertReal(std::move(r));
}

int CertReal::height() const { return is_plain() ? 0 : 1 + exponent_->height(); }

bool CertReal::is_huge() const { return !is_plain() && sign(*exponent_) > 0; }

bool CertReal::is_tiny() const { return !is_plain() && sign(*exponent_) < 0; }

std::string CertReal::describe() const {
  if (is_plain()) {
    if (enc_.is_point()) return to_pq(enc_.lo);
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g]", to_double(enc_.lo), to_double(enc_.hi));
    return buf;
  }
  return std::string(sign_ < 0 ? "-" : "") + "exp(" + exponent_->describe() + ")";
}

int sign(const CertReal& x) {
  if (!x.is_plain()) return x.outer_sign();
  const Enclosure& e = x.enclosure();
  if (e.lo > 0) return 1;
  if (e.hi < 0) return -1;
  if (e.lo == 0 && e.hi == 0) return 0;
  throw Uncertain("sign of enclosure straddling zero");
}

CertReal neg(const CertReal& x) {
  if (x.is_plain()) return CertReal::from_enclosure({-x.enclosure().hi, -x.enclosure().lo}, 0);
  return make_exp_form(-x.outer_sign(), x.exponent());
}

CertReal abs(const CertReal& x) { return sign(x) < 0 ? neg(x) : x; }

Rational abs_upper(const CertReal& x) {
  if (x.is_plain()) return abs_max(x.enclosure());
  if (x.is_tiny()) return tiny_bound();
  throw Uncertain("no rational upper bound for a huge magnitude");
}

Enclosure to_enclosure(const CertReal& x) {
  if (x.is_plain()) return x.enclosure();
  if (x.is_tiny()) throw Error(ErrorCode::underflow, "value below plain range: " + x.describe());
  throw Error(ErrorCode::overflow, "value above plain range: " + x.describe());
}

CertReal exp(const CertReal& u, long bits) {
  if (u.is_plain()) {
    const Enclosure& e = u.enclosure();
    if (e.lo > CertReal::kTowerCut || e.hi < -CertReal::kTowerCut) return make_exp_form(1, u);
    if (abs_max(e) <= 2 * CertReal::kTowerCut) return CertReal::from_enclosure(plain_exp(e, bits), bits);
    throw Uncertain("exp of a wide enclosure across the tower cut");
  }
  if (u.is_tiny()) {
    // |u| < 2^-kTinyBits, so |e^u - 1| <= 2|u|.
    Rational d = 2 * tiny_bound();
    return CertReal::from_enclosure({1 - d, 1 + d}, 0);
  }
  return make_exp_form(1, u);
}

CertReal log(const CertReal& x, long bits) {
  if (sign(x) <= 0) throw Uncertain("log of a non-positive value");
  if (x.is_plain()) return CertReal::from_enclosure(plain_log(x.enclosure(), bits), bits);
  return x.exponent();
}

CertReal reciprocal(const CertReal& x, long bits) {
  const int s = sign(x);
  if (s == 0) throw Error(ErrorCode::invalid_argument, "reciprocal of zero");
  if (x.is_plain()) {
    const Enclosure& e = x.enclosure();
    return CertReal::from_enclosure({Rational(1) / e.hi, Rational(1) / e.lo}, bits);
  }
  return make_exp_form(s, neg(x.exponent()));
}

namespace {

// Upper bound of e^d as a rational.
Rational exp_upper(const CertReal& d) {
  if (d.is_plain()) {
    const Rational& hi = d.enclosure().hi;
    if (hi < -CertReal::kTowerCut) return tiny_bound();
    if (hi > 2 * CertReal::kTowerCut) throw Uncertain("ratio bound too large");
    return exp_enclosure_bits(hi, 64).hi;
  }
  if (d.is_tiny()) return 1 + 2 * tiny_bound();
  if (d.outer_sign() < 0) return tiny_bound();
  throw Uncertain("ratio bound too large");
}

enum class SignRelation { same, opposite, unknown };

// big * (1 + t) with |t| <= rho_ub and t's sign given by `rel`; big in exp form.
CertReal scale_by_near_one(const CertReal& big, SignRelation rel, const Rational& rho_ub, long bits) {
  Enclosure factor_log;
  if (rel == SignRelation::same) {
    factor_log = {0, rho_ub};  // log(1+t) <= t
  } else {
    if (rho_ub > Rational(1, 2)) throw Uncertain("cancellation between comparable magnitudes");
    // log(1-t) >= -t/(1-t) >= -2t for t <= 1/2
    factor_log = {-2 * rho_ub, rel == SignRelation::opposite ? Rational(0) : rho_ub};
  }
  CertReal u = add(big.exponent(), CertReal::from_enclosure(factor_log, bits), bits);
  CertReal r = exp(u, bits);
  return big.outer_sign() < 0 ? neg(r) : r;
}

SignRelation relation(const CertReal& a, const CertReal& b) {
  return a.outer_sign() == b.outer_sign() ? SignRelation::same : SignRelation::opposite;
}

}  // namespace

CertReal add(const CertReal& x, const CertReal& y, long bits) {
  if (x.is_plain() && y.is_plain()) {
    const Enclosure& a = x.enclosure();
    const Enclosure& b = y.enclosure();
    return CertReal::from_enclosure({a.lo + b.lo, a.hi + b.hi}, bits);
  }
  if (x.is_plain() && x.enclosure() == Enclosure::point(0)) return y;
  if (y.is_plain() && y.enclosure() == Enclosure::point(0)) return x;

  // Plain plus tiny: widen the plain enclosure.
  if (x.is_plain() && y.is_tiny()) {
    const Enclosure& a = x.enclosure();
    return CertReal::from_enclosure({a.lo - tiny_bound(), a.hi + tiny_bound()}, bits);
  }
  if (y.is_plain() && x.is_tiny()) return add(y, x, bits);

  // Plain plus huge: the huge term dominates.
  if (x.is_plain() && y.is_huge()) return add(y, x, bits);
  if (y.is_plain() && x.is_huge()) {
    Rational small_ub = abs_max(y.enclosure());
    if (small_ub == 0) return x;
    Rational rho_ub;
    const CertReal& u = x.exponent();
    if (u.is_plain()) {
      Rational d_hi = log_enclosure_bits(small_ub, 64).hi - u.enclosure().lo;
      rho_ub = exp_upper(CertReal::exact(d_hi));
    } else {
      rho_ub = tiny_bound();
    }
    SignRelation rel = SignRelation::unknown;
    try {
      rel = sign(y) == x.outer_sign() ? SignRelation::same : SignRelation::opposite;
    } catch (const Uncertain&) {
    }
    return scale_by_near_one(x, rel, rho_ub, bits);
  }

  // Both in exp form.
  if (x.is_huge() != y.is_huge()) {
    const CertReal& big = x.is_huge() ? x : y;
    const CertReal& small = x.is_huge() ? y : x;
    return scale_by_near_one(big, relation(big, small), tiny_bound(), bits);
  }
  CertReal d = sub(y.exponent(), x.exponent(), bits);  // log|y| - log|x|
  bool swapped = false;
  try {
    if (sign(d) > 0) swapped = true;
  } catch (const Uncertain&) {
  }
  const CertReal& big = swapped ? y : x;
  const CertReal& small = swapped ? x : y;
  Rational rho_ub = exp_upper(swapped ? neg(d) : d);
  return scale_by_near_one(big, relation(big, small), rho_ub, bits);
}

CertReal sub(const CertReal& x, const CertReal& y, long bits) { return add(x, neg(y), bits); }

CertReal mul(const CertReal& x, const CertReal& y, long bits) {
  if (x.is_plain() && y.is_plain()) {
    const Enclosure& a = x.enclosure();
    const Enclosure& b = y.enclosure();
    Rational p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return CertReal::from_enclosure({*std::min_element(p, p + 4), *std::max_element(p, p + 4)}, bits);
  }
  const int s = sign(x) * sign(y);
  if (s == 0) return CertReal::exact(0);
  CertReal r = exp(add(log(abs(x), bits), log(abs(y), bits), bits), bits);
  return s < 0 ? neg(r) : r;
}

CertReal div(const CertReal& x, const CertReal& y, long bits) { return mul(x, reciprocal(y, bits), bits); }

namespace {

Ordering compare_enclosures(const Enclosure& a, const Enclosure& b) {
  if (a.hi < b.lo) return Ordering::less;
  if (b.hi < a.lo) return Ordering::greater;
  if (a.is_point() && b.is_point() && a.lo == b.lo) return Ordering::equal;
  throw Uncertain("overlapping enclosures");
}

Ordering reverse(Ordering o) {
  if (o == Ordering::less) return Ordering::greater;
  if (o == Ordering::greater) return Ordering::less;
  return o;
}

}  // namespace

Ordering compare(const CertReal& x, const CertReal& y, long bits) {
  if (x.is_plain() && y.is_plain()) return compare_enclosures(x.enclosure(), y.enclosure());

  int sx, sy;
  try {
    sx = sign(x);
  } catch (const Uncertain&) {
    // x is a plain enclosure straddling zero; y is in exp form.
    if (y.is_huge()) {
      CertReal bound = CertReal::exact(abs_max(x.enclosure()));
      if (compare(bound, abs(y), bits) == Ordering::less) {
        return y.outer_sign() > 0 ? Ordering::less : Ordering::greater;
      }
    }
    throw;
  }
  try {
    sy = sign(y);
  } catch (const Uncertain&) {
    return reverse(compare(y, x, bits));
  }
  if (sx != sy) return sx < sy ? Ordering::less : Ordering::greater;
  if (sx == 0) return Ordering::equal;
  Ordering mag = compare(log(abs(x), bits), log(abs(y), bits), bits);
  return sx > 0 ? mag : reverse(mag);
}

std::optional<Ordering> try_compare(const CertReal& x, const CertReal& y, long bits) {
  try {
    return compare(x, y, bits);
  } catch (const Uncertain&) {
    return std::nullopt;
  }
}

}  // namespace sparse_forge
