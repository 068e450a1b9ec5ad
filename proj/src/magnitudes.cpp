#include "sparse_forge/magnitudes.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <stdexcept>

namespace sparse_forge {

TowerMag::TowerMag(long d, Rational t) : depth(d), top(std::move(t)) {
  top.canonicalize();
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "tower depth must be >= 0");
  if (top <= 0) throw Error(ErrorCode::invalid_argument, "tower top must be > 0");
}

CertReal TowerMag::to_cert(long bits) const {
  if (depth == 0) return CertReal::exact(1 / top);
  CertReal v = CertReal::exact(top);
  for (long i = 1; i < depth; ++i) v = exp(v, bits);
  return exp(neg(v), bits);
}

std::string to_string(const TowerMag& m) {
  return "1/exp_" + std::to_string(m.depth) + "(" + to_pq(m.top) + ")";
}

std::string_view to_string(MagOrdering o) noexcept {
  switch (o) {
    case MagOrdering::less: return "LT";
    case MagOrdering::equal: return "EQ";
    case MagOrdering::greater: return "GT";
    case MagOrdering::unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

MagOrdering from_ordering(Ordering o) {
  switch (o) {
    case Ordering::less: return MagOrdering::less;
    case Ordering::equal: return MagOrdering::equal;
    case Ordering::greater: return MagOrdering::greater;
  }
  return MagOrdering::unknown;
}

// exp_n(t) as a certified real.
CertReal exp_iter(const Rational& t, long n, long bits) {
  CertReal v = CertReal::exact(t);
  for (long i = 0; i < n; ++i) v = exp(v, bits);
  return v;
}

}  // namespace

MagOrdering mag_compare(const TowerMag& a, const TowerMag& b, long ceiling_bits) {
  if (a == b) return MagOrdering::equal;
  // 1/exp_d(t) is decreasing in both d (for the same t) and t.
  if (a.top == b.top && a.below_one() && b.below_one())
    return a.depth > b.depth ? MagOrdering::less : MagOrdering::greater;
  if (a.depth == b.depth) return a.top > b.top ? MagOrdering::less : MagOrdering::greater;
  // Strip the common depth: compare exp_{da-m}(ta) with exp_{db-m}(tb), reversed.
  const long m = std::min(a.depth, b.depth);
  auto r = refine_compare(
      [&](long bits) {
        return std::pair{exp_iter(a.top, a.depth - m, bits), exp_iter(b.top, b.depth - m, bits)};
      },
      ceiling_bits);
  if (!r) return MagOrdering::unknown;
  switch (*r) {
    case Ordering::less: return MagOrdering::greater;
    case Ordering::greater: return MagOrdering::less;
    case Ordering::equal: return MagOrdering::equal;
  }
  return from_ordering(*r);
}

CertReal psi(const CertReal& t, long bits) {
  if (t.is_plain() && t.enclosure().is_point() && t.enclosure().lo == 0) return t;
  const CertReal one = CertReal::exact(1);
  const CertReal inv_e_minus_one = sub(exp(CertReal::exact(-1), bits), one, bits);
  if (auto o = try_compare(t, one, bits)) {
    if (*o == Ordering::less) {
      if (sign(t) <= 0) throw Error(ErrorCode::invalid_argument, "psi is defined on t >= 0");
      return exp(neg(reciprocal(t, bits)), bits);
    }
    return add(t, inv_e_minus_one, bits);
  }
  // Plain enclosure straddling 1: psi is increasing, so hull the endpoint images.
  const Enclosure& e = t.enclosure();
  Rational lo = 0;
  if (e.lo > 0) lo = to_enclosure(exp(neg(reciprocal(CertReal::exact(e.lo), bits)), bits)).lo;
  const Rational hi = to_enclosure(add(CertReal::exact(e.hi), inv_e_minus_one, bits)).hi;
  return CertReal::from_enclosure({lo, hi}, bits);
}

CertReal psi_iter(const CertReal& t, long l, long bits) {
  if (l < 0) throw Error(ErrorCode::invalid_argument, "psi_iter on CertReal needs l >= 0");
  CertReal v = t;
  for (long i = 0; i < l; ++i) v = psi(v, bits);
  return v;
}

TowerMag psi_iter(const TowerMag& t, long l) {
  if (l < 0) throw Error(ErrorCode::invalid_argument, "psi_iter on TowerMag needs l >= 0");
  if (l == 0) return t;
  if (!t.below_one()) throw Error(ErrorCode::invalid_argument, "psi on a tower needs a value below 1");
  return TowerMag(t.depth + l, t.top);
}

namespace {

constexpr long kMaxEvalBits = 1L << 16;

Enclosure psi_forward(long l, const Rational& t, const Rational& precision) {
  for (long bits = std::max(64L, bits_for(precision) + 16); bits <= kMaxEvalBits; bits *= 2) {
    CertReal v = psi_iter(CertReal::exact(t), l, bits);
    if (!v.is_plain()) throw Error(ErrorCode::underflow, "psi iterate below plain range; compare as TowerMag");
    Enclosure e = v.enclosure();
    if (e.width() <= precision) return e;
  }
  throw Error(ErrorCode::incomparable, "psi iterate did not reach requested precision");
}

// Ordering of psi_l(s) against t, refined up to ceiling_bits.
std::optional<Ordering> psi_vs(long l, const Rational& s, const Rational& t, long ceiling_bits) {
  return refine_compare(
      [&](long bits) { return std::pair{psi_iter(CertReal::exact(s), l, bits), CertReal::exact(t)}; },
      ceiling_bits);
}

Enclosure psi_inverse(long l, const Rational& t, const Rational& precision) {
  // psi(s) < s and psi(s) > s - 1, so the preimage lies in (t, t + l).
  Rational lo = t;
  Rational hi = t + l;
  const long ceiling = std::max(kDefaultCeilingBits, 4 * bits_for(precision));
  while (hi - lo > precision) {
    const Rational w = hi - lo;
    const Rational mid = lo + w / 2;
    if (auto o = psi_vs(l, mid, t, ceiling)) {
      if (*o == Ordering::equal) return Enclosure::point(mid);
      (*o == Ordering::less ? lo : hi) = mid;
      continue;
    }
    // mid is numerically indistinguishable from the root: bracket it tighter.
    const Rational a = mid - w / 4;
    const Rational b = mid + w / 4;
    auto oa = psi_vs(l, a, t, ceiling);
    auto ob = psi_vs(l, b, t, ceiling);
    if (!oa || !ob || *oa != Ordering::less || *ob != Ordering::greater)
      throw Error(ErrorCode::incomparable, "psi inverse bisection stalled at precision ceiling");
    lo = a;
    hi = b;
  }
  return {lo, hi};
}

}  // namespace

Enclosure psi_iter_eval(PsiSpec spec, const Rational& t, const Rational& precision) {
  if (t <= 0) throw Error(ErrorCode::invalid_argument, "psi_iter_eval needs t > 0");
  if (precision <= 0) throw Error(ErrorCode::invalid_argument, "precision must be > 0");
  if (spec.l == 0) return Enclosure::point(t);
  if (spec.l > 0) return psi_forward(spec.l, t, precision);
  return psi_inverse(-spec.l, t, precision);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Regime r) noexcept {
  return r == Regime::rational_fast ? "RATIONAL_FAST" : "TOWER_FAST";
}

Regime parse_regime(std::string_view text) {
  std::string s;
  for (char c : text) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s == "RATIONAL_FAST" || s == "RATIONAL") return Regime::rational_fast;
  if (s == "TOWER_FAST" || s == "TOWER") return Regime::tower_fast;
  throw Error(ErrorCode::parse_error, "unknown regime: " + std::string(text));
}

namespace {

// Above this many bits r_k is kept symbolic.
constexpr std::size_t kMaterializeBits = 1u << 20;

class RationalFastBasis final : public GapBasis {
 public:
  Regime regime() const override { return Regime::rational_fast; }

  CertReal element(std::size_t k, long bits) const override {
    const Integer e = rational_fast_exponent(k);
    if (4 * e < CertReal::kTowerCut) return CertReal::exact(pow2(-4 * e.get_si()));
    const long guard = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2)) + 8;
    const Enclosure ln2 = ln2_enclosure(bits + guard);
    const Rational scale = Rational(-4 * e);
    const CertReal u = CertReal::from_enclosure({scale * ln2.hi, scale * ln2.lo}, bits + guard);
    return exp(u, bits);
  }

  std::optional<Rational> exact_element(std::size_t k, std::size_t max_bits) const override {
    const Integer e = rational_fast_exponent(k);
    if (e * 4 > max_bits) return std::nullopt;
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 16, e.get_ui());
    return Rational(Integer(1), den);
  }

  std::optional<TowerMag> tower_element(std::size_t k) const override {
    const Integer e = rational_fast_exponent(k);
    if (e * 4 > kMaterializeBits) return std::nullopt;
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 16, e.get_ui());
    return TowerMag(0, Rational(den));
  }
};

class TowerFastBasis final : public GapBasis {
 public:
  Regime regime() const override { return Regime::tower_fast; }

  CertReal element(std::size_t k, long bits) const override { return tower(k).to_cert(bits); }

  std::optional<Rational> exact_element(std::size_t k, std::size_t max_bits) const override {
    const TowerMag m = tower(k);
    if (m.depth != 0 || bit_size(m.top) > max_bits) return std::nullopt;
    return 1 / m.top;
  }

  std::optional<TowerMag> tower_element(std::size_t k) const override { return tower(k); }

 private:
  TowerMag tower(std::size_t k) const {
    std::lock_guard lock(mu_);
    while (seq_.size() <= k) seq_.push_back(next(seq_.size() - 1, seq_.back()));
    return seq_[k];
  }

  // r_{k+1} = min(r_k / 16, psi_k(r_k)).
  static TowerMag next(std::size_t k, const TowerMag& r) {
    const TowerMag candidate = r.below_one() || k == 0 ? psi_iter(r, static_cast<long>(k)) : r;
    auto o = refine_compare(
        [&](long bits) {
          return std::pair{candidate.to_cert(bits),
                           div(r.to_cert(bits), CertReal::exact(kDomination), bits)};
        },
        kDefaultCeilingBits);
    if (o && *o != Ordering::greater) return candidate;
    if (o && r.depth == 0) return TowerMag(0, r.top * kDomination);
    throw Error(ErrorCode::incomparable, "tower basis step could not be certified");
  }

  mutable std::mutex mu_;
  mutable std::vector<TowerMag> seq_{TowerMag(0, 1)};
};

std::mutex exponent_mu;
std::vector<Integer> exponent_memo{Integer(0), Integer(1)};

}  // namespace

Integer rational_fast_exponent(std::size_t k) {
  std::lock_guard lock(exponent_mu);
  while (exponent_memo.size() <= k) {
    const std::size_t j = exponent_memo.size() - 1;
    exponent_memo.push_back(exponent_memo.back() * static_cast<unsigned long>(j + 2));
  }
  return exponent_memo[k];
}

std::shared_ptr<const GapBasis> gap_basis(Regime regime) {
  static const auto rational = std::make_shared<const RationalFastBasis>();
  static const auto tower = std::make_shared<const TowerFastBasis>();
  if (regime == Regime::rational_fast) return rational;
  return tower;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

long parse_precision_bits(std::string_view raw) {
  const std::string text = trim(raw);
  if (text.rfind("2^", 0) == 0) {
    long e = 0;
    try {
      std::size_t used = 0;
      e = std::stol(text.substr(2), &used);
      if (used != text.size() - 2) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "bad precision: " + text);
    }
    if (e >= 0) throw Error(ErrorCode::invalid_argument, "precision must be below 1: " + text);
    return -e;
  }
  const Rational p = parse_rational(text);
  if (p <= 0 || p >= 1) throw Error(ErrorCode::invalid_argument, "precision must lie in (0,1): " + text);
  // Smallest b with 2^-b <= p.
  const long b = -floor_log2(p);
  return pow2(-b) <= p ? b : b + 1;
}

MagnitudeConfig parse_magnitude_config(std::string_view text,
                                       std::vector<std::pair<std::string, std::string>>* rest) {
  MagnitudeConfig cfg;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::parse_error, "config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "regime") {
      cfg.regime = parse_regime(value);
    } else if (key == "precision_ceiling") {
      cfg.precision_ceiling_bits = parse_precision_bits(value);
    } else if (key == "kmax") {
      try {
        cfg.kmax = std::stoi(value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse_error, "config line " + std::to_string(line_no) + ": bad kmax");
      }
      if (cfg.kmax < 0) throw Error(ErrorCode::invalid_argument, "kmax must be >= 0");
    } else if (rest) {
      rest->emplace_back(key, value);
    } else {
      throw Error(ErrorCode::parse_error, "config line " + std::to_string(line_no) + ": unknown key " + key);
    }
    if (end == text.size()) break;
  }
  return cfg;
}

}  // namespace sparse_forge
