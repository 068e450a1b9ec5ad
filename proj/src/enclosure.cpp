#include "sparse_forge/enclosure.hpp"

#include "sparse_forge/errors.hpp"

#include <map>
#include <mutex>

namespace sparse_forge {

Enclosure round_out(const Enclosure& e, long bits) {
  return {round_down(e.lo, bits), round_up(e.hi, bits)};
}

long bits_for(const Rational& precision) {
  if (precision <= 0) throw Error(ErrorCode::invalid_argument, "precision must be positive");
  long e = floor_log2(precision);
  return e >= 0 ? 1 : -e + 1;
}

namespace {

// e^y for 0 <= y <= 2^-8, Taylor series with directed rounding.
Enclosure exp_small(const Rational& y, long w) {
  Rational term_lo = 1, term_hi = 1;
  Rational sum_lo = 1, sum_hi = 1;
  const Rational eps = pow2(-w - 4);
  for (long i = 1;; ++i) {
    term_lo = round_down(term_lo * y / i, w + 8);
    term_hi = round_up(term_hi * y / i, w + 8);
    sum_lo = round_down(sum_lo + term_lo, w + 8);
    sum_hi = round_up(sum_hi + term_hi, w + 8);
    if (term_hi < eps || term_hi == 0) {
      // Tail after term i is at most term_i * y / (i+1) / (1-y) <= 2 term_i y.
      sum_hi = round_up(sum_hi + 2 * term_hi * y, w + 8);
      break;
    }
  }
  return {sum_lo, sum_hi};
}

Enclosure exp_positive(const Rational& q, long bits) {
  long s = 0;
  if (q > 0) {
    long e = floor_log2(q);
    s = e + 9 > 0 ? e + 9 : 0;
  }
  const long w = bits + s + 24;
  Rational y = q;
  if (s > 0) mpq_div_2exp(y.get_mpq_t(), y.get_mpq_t(), static_cast<mp_bitcnt_t>(s));
  Enclosure r = exp_small(y, w);
  for (long i = 0; i < s; ++i) {
    r.lo = round_down(r.lo * r.lo, w);
    r.hi = round_up(r.hi * r.hi, w);
  }
  return r;
}

// 2 * atanh(z) for 0 <= z <= 1/3 with directed rounding; z exact.
Enclosure two_atanh(const Rational& z, long w) {
  if (z == 0) return Enclosure::point(0);
  const Rational z2 = z * z;
  Rational pow_lo = z, pow_hi = z;
  Rational sum_lo = 0, sum_hi = 0;
  const Rational eps = pow2(-w - 4);
  for (long i = 0;; ++i) {
    Rational t_lo = round_down(pow_lo / (2 * i + 1), w + 8);
    Rational t_hi = round_up(pow_hi / (2 * i + 1), w + 8);
    sum_lo = round_down(sum_lo + t_lo, w + 8);
    sum_hi = round_up(sum_hi + t_hi, w + 8);
    pow_lo = round_down(pow_lo * z2, w + 8);
    pow_hi = round_up(pow_hi * z2, w + 8);
    if (pow_hi < eps) {
      // Remaining terms sum to at most pow/(2i+3)/(1-z^2) <= 2 * pow.
      sum_hi = round_up(sum_hi + 2 * pow_hi, w + 8);
      break;
    }
  }
  return {2 * sum_lo, 2 * sum_hi};
}

std::mutex g_ln2_mutex;
std::map<long, Enclosure> g_ln2_cache;

}  // namespace

Enclosure ln2_enclosure(long bits) {
  std::lock_guard lock(g_ln2_mutex);
  auto it = g_ln2_cache.lower_bound(bits);
  if (it != g_ln2_cache.end() && it->first < bits + 64) return it->second;
  Enclosure r = two_atanh(Rational(1, 3), bits + 8);
  g_ln2_cache.emplace(bits, r);
  return r;
}

Enclosure exp_enclosure_bits(const Rational& q, long bits) {
  if (q == 0) return Enclosure::point(1);
  if (abs(q) > kExpArgCeiling) {
    throw Error(ErrorCode::overflow, "exp argument beyond ceiling; use tower magnitudes");
  }
  if (q > 0) return round_out(exp_positive(q, bits + 4), bits + 2);
  Enclosure p = exp_positive(-q, bits + 4);
  return round_out({Rational(1) / p.hi, Rational(1) / p.lo}, bits + 2);
}

Enclosure exp_enclosure(const Rational& q, const Rational& precision) {
  // Absolute width target: relative bits plus the magnitude of e^q.
  long mag = q > 0 ? static_cast<long>(to_double(q) * 1.4426950408889634) + 2 : 0;
  long bits = bits_for(precision) + mag + 8;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Enclosure r = exp_enclosure_bits(q, bits);
    if (r.width() <= precision) return r;
    bits *= 2;
  }
  throw Error(ErrorCode::incomparable, "exp enclosure failed to reach requested width");
}

Enclosure log_enclosure_bits(const Rational& x, long bits) {
  if (x <= 0) throw Error(ErrorCode::invalid_argument, "log of non-positive value");
  if (x == 1) return Enclosure::point(0);
  const long e = floor_log2(x);
  const long w = bits + 16;
  Rational m = x;
  if (e > 0) mpq_div_2exp(m.get_mpq_t(), m.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  if (e < 0) mpq_mul_2exp(m.get_mpq_t(), m.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  // m in [1, 2). Round outward so the series works on short numbers.
  Rational m_lo = round_down(m, w);
  Rational m_hi = round_up(m, w);
  if (m_lo < 1) m_lo = 1;
  Enclosure lm_lo = two_atanh((m_lo - 1) / (m_lo + 1), w);
  Enclosure lm_hi = two_atanh((m_hi - 1) / (m_hi + 1), w);
  Enclosure out{lm_lo.lo, lm_hi.hi};
  if (e != 0) {
    long extra = 0;
    for (long a = e < 0 ? -e : e; a > 0; a >>= 1) ++extra;
    Enclosure l2 = ln2_enclosure(w + extra);
    if (e > 0) {
      out.lo += e * l2.lo;
      out.hi += e * l2.hi;
    } else {
      out.lo += e * l2.hi;
      out.hi += e * l2.lo;
    }
  }
  // Absolute rounding at 2^-(bits+4) plus relative guard for large results.
  long mag = 0;
  if (out.hi != 0 && abs(out.hi) >= 1) mag = floor_log2(abs(out.hi)) + 1;
  return round_out(out, bits + 4 + mag);
}

Enclosure log_enclosure(const Rational& x, const Rational& precision) {
  long bits = bits_for(precision) + 8;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Enclosure r = log_enclosure_bits(x, bits);
    if (r.width() <= precision) return r;
    bits *= 2;
  }
  throw Error(ErrorCode::incomparable, "log enclosure failed to reach requested width");
}

std::string to_json_text(const Enclosure& e) {
  return "{\"lo\":\"" + to_pq(e.lo) + "\",\"hi\":\"" + to_pq(e.hi) + "\"}";
}

}  // namespace sparse_forge
