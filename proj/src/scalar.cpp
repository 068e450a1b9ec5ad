#include "sparse_forge/scalar.hpp"

#include <algorithm>

namespace sparse_forge {

namespace {

constexpr std::int64_t kLeadGuard = 8;
// Basis indices searched when matching a tower against its regime basis.
constexpr std::size_t kBasisSearch = 256;

std::int64_t to_i64(const Integer& z) {
  if (!z.fits_slong_p()) throw Error(ErrorCode::overflow, "gap combination coefficient exceeds 64 bits");
  return z.get_si();
}

// Builds a canonical Scalar from big-integer coefficients.
Scalar make_combo(Regime regime, std::vector<Integer> c, Integer den) {
  if (den == 0) throw Error(ErrorCode::invalid_argument, "combination denominator is zero");
  if (den < 0) {
    den = -den;
    for (auto& x : c) x = -x;
  }
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (c.empty()) return Scalar(Rational(0));
  Integer g = den;
  for (const auto& x : c) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g != 1) {
    for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
  }
  if (c.size() == 1) return Scalar(Rational(c[0], den));
  GapCombo out{regime, {}, den};
  out.coeffs.reserve(c.size());
  for (const auto& x : c) out.coeffs.push_back(to_i64(x));
  return Scalar(std::move(out));
}

std::vector<Integer> widen(const std::vector<std::int64_t>& c) {
  std::vector<Integer> out;
  out.reserve(c.size());
  for (auto x : c) out.emplace_back(static_cast<long>(x));
  return out;
}

// Regime shared by the operands of a mixed operation.
Regime common_regime(const Scalar& a, const Scalar& b) {
  if (a.is_combo() && b.is_combo() && a.gap_combo().regime != b.gap_combo().regime)
    throw Error(ErrorCode::invalid_argument, "combinations from different regimes");
  if (a.is_combo()) return a.gap_combo().regime;
  if (b.is_combo()) return b.gap_combo().regime;
  return Regime::tower_fast;
}

CertReal combo_cert(const GapCombo& c, long bits) {
  const auto basis = gap_basis(c.regime);
  CertReal sum = CertReal::exact(0);
  for (std::size_t i = c.coeffs.size(); i-- > 0;) {
    if (c.coeffs[i] == 0) continue;
    CertReal term = mul(CertReal::exact(Rational(static_cast<long>(c.coeffs[i]))), basis->element(i, bits), bits);
    sum = add(sum, term, bits);
  }
  return div(sum, CertReal::exact(Rational(c.den)), bits);
}

}  // namespace

Scalar::Scalar(const Rational& q) : v_(q) { std::get<Rational>(v_).canonicalize(); }

Scalar::Scalar(GapCombo c) : v_(std::move(c)) {}

Scalar::Scalar(TowerMag m) {
  if (m.depth == 0)
    v_ = Rational(1 / m.top);
  else
    v_ = std::move(m);
}

Scalar Scalar::basis(Regime regime, std::size_t k) {
  std::vector<Integer> c(k + 1, Integer(0));
  c[k] = 1;
  return make_combo(regime, std::move(c), 1);
}

Scalar Scalar::combo(Regime regime, std::vector<std::int64_t> coeffs, Integer den) {
  return make_combo(regime, widen(coeffs), std::move(den));
}

CertReal Scalar::to_cert(long bits) const {
  return std::visit(
      [bits](const auto& x) -> CertReal {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rational>)
          return CertReal::exact(x);
        else if constexpr (std::is_same_v<T, GapCombo>)
          return combo_cert(x, bits);
        else
          return x.to_cert(bits);
      },
      v_);
}

std::optional<Rational> Scalar::to_rational(std::size_t max_bits) const {
  if (is_rational()) return rational();
  if (is_tower()) return std::nullopt;
  const GapCombo& c = gap_combo();
  const auto basis = gap_basis(c.regime);
  Rational sum = 0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    if (c.coeffs[i] == 0) continue;
    auto r = basis->exact_element(i, max_bits);
    if (!r) return std::nullopt;
    sum += Rational(static_cast<long>(c.coeffs[i])) * *r;
  }
  sum /= c.den;
  return sum;
}

GapCombo as_combo(const Scalar& s, Regime regime) {
  if (s.is_combo()) {
    if (s.gap_combo().regime != regime) throw Error(ErrorCode::invalid_argument, "combination from another regime");
    return s.gap_combo();
  }
  if (s.is_rational()) {
    const Rational& q = s.rational();
    GapCombo c{regime, {}, q.get_den()};
    if (q != 0) c.coeffs.push_back(to_i64(q.get_num()));
    return c;
  }
  const auto basis = gap_basis(regime);
  for (std::size_t k = 0; k < kBasisSearch; ++k) {
    auto t = basis->tower_element(k);
    if (!t || t->depth > s.tower().depth) break;
    if (*t == s.tower()) {
      GapCombo c{regime, std::vector<std::int64_t>(k + 1, 0), 1};
      c.coeffs[k] = 1;
      return c;
    }
  }
  throw Error(ErrorCode::invalid_argument, "tower " + to_string(s.tower()) + " is not a basis element");
}

std::optional<TowerMag> as_tower(const Scalar& s) {
  if (s.is_tower()) return s.tower();
  if (!s.is_combo()) return std::nullopt;
  const GapCombo& g = s.gap_combo();
  if (g.coeffs.back() != 1 || g.den != 1 ||
      !std::all_of(g.coeffs.begin(), g.coeffs.end() - 1, [](std::int64_t x) { return x == 0; }))
    return std::nullopt;
  return gap_basis(g.regime)->tower_element(g.coeffs.size() - 1);
}

constexpr std::size_t kPrefixBits = 4096;

int combo_sign(const GapCombo& c, long ceiling_bits) {
  auto lead = std::find_if(c.coeffs.begin(), c.coeffs.end(), [](std::int64_t x) { return x != 0; });
  if (lead == c.coeffs.end()) return 0;
  std::int64_t tail = 0;
  for (auto it = lead + 1; it != c.coeffs.end(); ++it) tail = std::max(tail, *it < 0 ? -*it : *it);
  const std::int64_t mag = *lead < 0 ? -*lead : *lead;
  if (tail <= kLeadGuard * mag) return *lead > 0 ? 1 : -1;
  // Exact prefix sums over small basis elements; the rest is bounded by
  // tail * r_{m+1} * 16/15 since r_{i+1} <= r_i / 16.
  const auto basis = gap_basis(c.regime);
  Rational prefix = 0;
  for (auto m = static_cast<std::size_t>(lead - c.coeffs.begin()); m < c.coeffs.size(); ++m) {
    const auto rm = basis->exact_element(m, kPrefixBits);
    if (!rm) break;
    prefix += Rational(static_cast<long>(c.coeffs[m])) * *rm;
    std::int64_t rest = 0;
    for (std::size_t i = m + 1; i < c.coeffs.size(); ++i) rest = std::max(rest, c.coeffs[i] < 0 ? -c.coeffs[i] : c.coeffs[i]);
    if (rest == 0) return sgn(prefix);
    const auto next = basis->exact_element(m + 1, kPrefixBits);
    const Rational step = next ? Rational(*next * Rational(16, 15)) : Rational(*rm / 15);
    const Rational bound = Rational(rest) * step;
    if (abs(prefix) > bound) return sgn(prefix);
  }
  const Scalar s(c);
  if (auto q = s.to_rational()) return sgn(*q);
  auto o = refine_compare([&](long bits) { return std::pair{s.to_cert(bits), CertReal::exact(0)}; }, ceiling_bits);
  if (!o) throw Error(ErrorCode::incomparable, "sign of " + to_string(s) + " unresolved at precision ceiling");
  return *o == Ordering::less ? -1 : (*o == Ordering::greater ? 1 : 0);
}

Ordering scalar_compare(const Scalar& a, const Scalar& b, long ceiling_bits) {
  if (a == b) return Ordering::equal;
  if (a.is_rational() && b.is_rational()) {
    const int c = cmp(a.rational(), b.rational());
    return c < 0 ? Ordering::less : (c > 0 ? Ordering::greater : Ordering::equal);
  }
  if (a.is_tower() && b.is_tower()) {
    switch (mag_compare(a.tower(), b.tower(), ceiling_bits)) {
      case MagOrdering::less: return Ordering::less;
      case MagOrdering::greater: return Ordering::greater;
      case MagOrdering::equal: return Ordering::equal;
      case MagOrdering::unknown: break;
    }
    throw Error(ErrorCode::incomparable, to_string(a) + " vs " + to_string(b));
  }
  if (a.is_combo() || b.is_combo()) {
    try {
      const Scalar d = a - b;
      const int s = d.is_rational() ? sgn(d.rational()) : combo_sign(d.gap_combo(), ceiling_bits);
      return s < 0 ? Ordering::less : (s > 0 ? Ordering::greater : Ordering::equal);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_argument && e.code() != ErrorCode::overflow) throw;
    }
  }
  // Mixed regimes: exact when both sides materialize, else certified refinement.
  if (const auto x = a.to_rational(kPrefixBits)) {
    if (const auto y = b.to_rational(kPrefixBits)) {
      const int c = cmp(*x, *y);
      return c < 0 ? Ordering::less : (c > 0 ? Ordering::greater : Ordering::equal);
    }
  }
  auto o = refine_compare([&](long bits) { return std::pair{a.to_cert(bits), b.to_cert(bits)}; }, ceiling_bits);
  if (!o) throw Error(ErrorCode::incomparable, to_string(a) + " vs " + to_string(b));
  return *o;
}

Scalar operator-(const Scalar& a) {
  if (a.is_rational()) return Scalar(Rational(-a.rational()));
  const GapCombo c = as_combo(a, a.is_combo() ? a.gap_combo().regime : Regime::tower_fast);
  auto w = widen(c.coeffs);
  for (auto& x : w) x = -x;
  return make_combo(c.regime, std::move(w), c.den);
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_rational() && b.is_rational()) return Scalar(Rational(a.rational() + b.rational()));
  const Regime regime = common_regime(a, b);
  const GapCombo x = as_combo(a, regime);
  const GapCombo y = as_combo(b, regime);
  Integer den;
  mpz_lcm(den.get_mpz_t(), x.den.get_mpz_t(), y.den.get_mpz_t());
  const Integer fx = den / x.den;
  const Integer fy = den / y.den;
  std::vector<Integer> c(std::max(x.coeffs.size(), y.coeffs.size()), Integer(0));
  for (std::size_t i = 0; i < x.coeffs.size(); ++i) c[i] += fx * static_cast<long>(x.coeffs[i]);
  for (std::size_t i = 0; i < y.coeffs.size(); ++i) c[i] += fy * static_cast<long>(y.coeffs[i]);
  return make_combo(regime, std::move(c), den);
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Rational& q, const Scalar& a) {
  if (a.is_rational()) return Scalar(Rational(q * a.rational()));
  const GapCombo c = as_combo(a, a.is_combo() ? a.gap_combo().regime : Regime::tower_fast);
  auto w = widen(c.coeffs);
  for (auto& x : w) x *= q.get_num();
  return make_combo(c.regime, std::move(w), c.den * q.get_den());
}

Scalar operator/(const Scalar& a, const Rational& q) {
  if (q == 0) throw Error(ErrorCode::invalid_argument, "division by zero");
  return Rational(1 / q) * a;
}

std::string to_string(const Scalar& s) {
  if (s.is_rational()) return to_pq(s.rational());
  if (s.is_tower()) return to_string(s.tower());
  const GapCombo& c = s.gap_combo();
  std::string out = "combo[";
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(c.coeffs[i]);
  }
  out += ']';
  if (c.den != 1) out += "/" + c.den.get_str();
  return out;
}

void to_json(nlohmann::json& j, const Scalar& s) {
  if (s.is_rational()) {
    j = to_pq(s.rational());
  } else if (s.is_tower()) {
    j = {{"tower", {{"depth", s.tower().depth}, {"top", to_pq(s.tower().top)}}}};
  } else {
    const GapCombo& c = s.gap_combo();
    j = {{"combo", c.coeffs}, {"regime", std::string(to_string(c.regime))}};
    if (c.den != 1) j["den"] = c.den.get_str();
  }
}

void from_json(const nlohmann::json& j, Scalar& s) {
  try {
    if (j.is_string()) {
      s = Scalar(parse_rational(j.get<std::string>()));
    } else if (j.is_number_integer()) {
      s = Scalar(Rational(j.get<long>()));
    } else if (j.is_object() && j.contains("tower")) {
      const auto& t = j.at("tower");
      s = Scalar(TowerMag(t.at("depth").get<long>(), parse_rational(t.at("top").get<std::string>())));
    } else if (j.is_object() && j.contains("combo")) {
      const Regime regime = j.contains("regime") ? parse_regime(j.at("regime").get<std::string>())
                                                 : Regime::rational_fast;
      Integer den = 1;
      if (j.contains("den")) {
        const auto& d = j.at("den");
        den = d.is_string() ? Integer(d.get<std::string>()) : Integer(d.get<long>());
      }
      s = Scalar::combo(regime, j.at("combo").get<std::vector<std::int64_t>>(), den);
    } else {
      throw Error(ErrorCode::parse_error, "unrecognized scalar: " + j.dump());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed scalar: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed integer: ") + e.what());
  }
}

}  // namespace sparse_forge
