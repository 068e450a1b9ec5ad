#include "sparse_forge/rational.hpp"

#include "sparse_forge/errors.hpp"

#include <cctype>
#include <cmath>

namespace sparse_forge {

namespace {

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

Integer parse_integer(std::string_view s) {
  if (!is_integer_text(s)) {
    throw Error(ErrorCode::parse_error, "not an integer: '" + std::string(s) + "'");
  }
  std::string t(s);
  if (t[0] == '+') t.erase(0, 1);
  return Integer(t, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::parse_error, "empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer p = parse_integer(text.substr(0, slash));
    Integer q = parse_integer(text.substr(slash + 1));
    if (q == 0) throw Error(ErrorCode::parse_error, "zero denominator in '" + std::string(text) + "'");
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot);
    std::string_view fp = text.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (ip.empty() || ip == "-" || ip == "+") ip = neg ? "-0" : "0";
    if (fp.empty()) fp = "0";
    Integer whole = parse_integer(ip);
    Integer frac = parse_integer(fp);
    if (frac < 0) throw Error(ErrorCode::parse_error, "bad decimal '" + std::string(text) + "'");
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Rational r(abs(whole) * scale + frac, scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  return Rational(parse_integer(text));
}

std::string to_pq(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

long floor_log2(const Rational& x) {
  if (x == 0) throw Error(ErrorCode::invalid_argument, "floor_log2 of zero");
  Integer n = abs(x.get_num());
  const Integer& d = x.get_den();
  long e = static_cast<long>(mpz_sizeinbase(n.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(d.get_mpz_t(), 2));
  // 2^(e-1) < n/d < 2^(e+1); settle which side of 2^e we are on.
  Rational probe = pow2(e);
  Rational ax = abs(x);
  if (ax < probe) --e;
  return e;
}

Rational pow2(long e) {
  Integer p = 1;
  if (e >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return Rational(Integer(1), p);
}

namespace {

// floor(x * 2^shift) for possibly negative shift.
Integer scaled_floor(const Rational& x, long shift) {
  Integer num = x.get_num();
  Integer den = x.get_den();
  if (shift >= 0) {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  } else {
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return out;
}

Rational from_scaled(const Integer& m, long shift) {
  Rational r(m);
  if (shift >= 0) {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(shift));
  } else {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-shift));
  }
  return r;
}

}  // namespace

Rational round_down(const Rational& x, long bits) {
  if (x == 0) return x;
  long e = floor_log2(x);
  long shift = bits - e;
  // Already representable with this many bits: keep exact.
  if (shift >= 0 && mpz_sizeinbase(x.get_den().get_mpz_t(), 2) <= static_cast<std::size_t>(shift) + 1 &&
      mpz_popcount(x.get_den().get_mpz_t()) == 1) {
    return x;
  }
  return from_scaled(scaled_floor(x, shift), shift);
}

Rational round_up(const Rational& x, long bits) {
  return -round_down(-x, bits);
}

double to_double(const Rational& x) {
  if (x == 0) return 0.0;
  long e = floor_log2(x);
  if (e > 1000) return x > 0 ? HUGE_VAL : -HUGE_VAL;
  if (e < -1100) return 0.0;
  return x.get_d();
}

std::size_t bit_size(const Rational& x) {
  return mpz_sizeinbase(x.get_num().get_mpz_t(), 2) + mpz_sizeinbase(x.get_den().get_mpz_t(), 2);
}

}  // namespace sparse_forge
