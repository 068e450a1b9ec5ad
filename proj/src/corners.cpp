#include "sparse_forge/corners.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace sparse_forge {

// ---------------------------------------------------------------------------
// Q(sqrt 2)

QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y) { return {x.a + y.a, x.b + y.b}; }
QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y) { return {x.a - y.a, x.b - y.b}; }
QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y) { return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a}; }

int sign(const QSqrt2& x) {
  const int sa = sgn(x.a), sb = sgn(x.b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: |a| vs |b| sqrt 2, never equal for rational a, b != 0.
  return x.a * x.a > 2 * x.b * x.b ? sa : sb;
}

std::string to_string(const QSqrt2& x) {
  if (x.b == 0) return to_pq(x.a);
  const std::string b = (x.b < 0 ? "-" : "+") + to_pq(abs(x.b)) + "*sqrt2";
  return x.a == 0 ? (x.b < 0 ? b : b.substr(1)) : to_pq(x.a) + b;
}

// ---------------------------------------------------------------------------
// Symmetry groups

bool SymmetryElement::is_signed_permutation() const {
  for (int i = 0; i < n; ++i) {
    int nonzero = 0;
    for (int j = 0; j < n; ++j) {
      const QSqrt2& e = at(i, j);
      if (e == QSqrt2{}) continue;
      if (e.b != 0 || (e.a != 1 && e.a != -1)) return false;
      ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return true;
}

SymmetryElement identity_element(int n) {
  std::vector<int> perm(n), signs(n, 1);
  std::iota(perm.begin(), perm.end(), 0);
  return signed_permutation(perm, signs);
}

SymmetryElement signed_permutation(const std::vector<int>& perm, const std::vector<int>& signs) {
  const int n = static_cast<int>(perm.size());
  if (signs.size() != perm.size()) throw Error(ErrorCode::invalid_argument, "perm and signs differ in length");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (perm[i] < 0 || perm[i] >= n || seen[static_cast<std::size_t>(perm[i])])
      throw Error(ErrorCode::invalid_argument, "not a permutation");
    seen[static_cast<std::size_t>(perm[i])] = true;
    if (signs[i] != 1 && signs[i] != -1) throw Error(ErrorCode::invalid_argument, "signs must be +1 or -1");
  }
  SymmetryElement t{n, std::vector<QSqrt2>(static_cast<std::size_t>(n * n))};
  for (int i = 0; i < n; ++i) t.m[static_cast<std::size_t>(i * n + perm[i])] = {Rational(signs[i]), 0};
  return t;
}

SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b) {
  if (a.n != b.n) throw Error(ErrorCode::invalid_argument, "dimension mismatch");
  const int n = a.n;
  SymmetryElement c{n, std::vector<QSqrt2>(static_cast<std::size_t>(n * n))};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QSqrt2 s;
      for (int k = 0; k < n; ++k) s = s + a.at(i, k) * b.at(k, j);
      c.m[static_cast<std::size_t>(i * n + j)] = s;
    }
  return c;
}

SymmetryElement transpose(const SymmetryElement& a) {
  SymmetryElement t = a;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) t.m[static_cast<std::size_t>(i * a.n + j)] = a.at(j, i);
  return t;
}

QSqrt2 determinant(const SymmetryElement& a) {
  // Laplace expansion; n <= 4.
  if (a.n == 1) return a.at(0, 0);
  QSqrt2 det;
  for (int j = 0; j < a.n; ++j) {
    SymmetryElement minor{a.n - 1, {}};
    for (int r = 1; r < a.n; ++r)
      for (int c = 0; c < a.n; ++c)
        if (c != j) minor.m.push_back(a.at(r, c));
    const QSqrt2 term = a.at(0, j) * determinant(minor);
    det = j % 2 == 0 ? det + term : det - term;
  }
  return det;
}

std::vector<QSqrt2> apply(const SymmetryElement& t, const std::vector<QSqrt2>& v) {
  if (static_cast<int>(v.size()) != t.n) throw Error(ErrorCode::invalid_argument, "dimension mismatch");
  std::vector<QSqrt2> out(v.size());
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) out[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i)] + t.at(i, j) * v[static_cast<std::size_t>(j)];
  return out;
}

std::vector<Scalar> apply(const SymmetryElement& t, const std::vector<Scalar>& v) {
  if (!t.is_signed_permutation()) throw Error(ErrorCode::invalid_argument, "scalar vectors need a signed permutation");
  if (static_cast<int>(v.size()) != t.n) throw Error(ErrorCode::invalid_argument, "dimension mismatch");
  std::vector<Scalar> out(v.size());
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) {
      const QSqrt2& e = t.at(i, j);
      if (e.a == 1) out[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(j)];
      if (e.a == -1) out[static_cast<std::size_t>(i)] = -v[static_cast<std::size_t>(j)];
    }
  return out;
}

bool in_closed_sbb(const std::vector<QSqrt2>& x) {
  if (x.empty()) return true;
  if (sign(x.back()) < 0) return false;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (sign(x[i] - QSqrt2{2, 0} * x[i + 1]) < 0) return false;
  return true;
}

bool SymmetryGroup::covers_all_directions() const {
  return std::all_of(covering.begin(), covering.end(), [](const DirectionCheck& d) { return d.covered; });
}

namespace {

std::vector<SymmetryElement> octagon_group() {
  const Rational h(1, 2);
  // (cos, sin) of j * 45 degrees.
  const std::vector<std::pair<QSqrt2, QSqrt2>> cs = {
      {{1, 0}, {0, 0}}, {{0, h}, {0, h}}, {{0, 0}, {1, 0}},   {{0, -h}, {0, h}},
      {{-1, 0}, {0, 0}}, {{0, -h}, {0, -h}}, {{0, 0}, {-1, 0}}, {{0, h}, {0, -h}}};
  const SymmetryElement flip = signed_permutation({0, 1}, {1, -1});
  std::vector<SymmetryElement> out;
  for (const auto& [c, s] : cs) out.push_back({2, {c, QSqrt2{} - s, s, c}});
  for (std::size_t i = 0; i < cs.size(); ++i) out.push_back(compose(out[i], flip));
  return out;
}

std::vector<SymmetryElement> signed_permutations(int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SymmetryElement> out;
  do {
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> signs(n);
      for (int i = 0; i < n; ++i) signs[i] = (mask >> i) & 1 ? -1 : 1;
      out.push_back(signed_permutation(perm, signs));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

SymmetryGroup corner_symmetries(int n) {
  if (n < 1 || n > 4) throw Error(ErrorCode::unsupported_dimension, "symmetry groups are provided for 1 <= n <= 4");
  SymmetryGroup g;
  g.n = n;
  if (n == 1) {
    g.reading = "sign";
    g.elements = signed_permutations(1);
  } else if (n == 2) {
    g.reading = "octagon";
    g.elements = octagon_group();
  } else {
    g.reading = "signed-permutation";
    g.elements = signed_permutations(n);
  }
  std::vector<int> u(n, -1);
  while (true) {
    if (std::any_of(u.begin(), u.end(), [](int x) { return x != 0; })) {
      std::vector<QSqrt2> q;
      for (int x : u) q.push_back({Rational(x), 0});
      const bool covered = std::any_of(g.elements.begin(), g.elements.end(),
                                       [&](const SymmetryElement& t) { return in_closed_sbb(sparse_forge::apply(transpose(t), q)); });
      g.covering.push_back({u, covered});
    }
    int i = 0;
    while (i < n && u[i] == 1) u[i++] = -1;
    if (i == n) break;
    ++u[i];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Corner cells

std::string CornerSpec::name() const {
  switch (kind) {
    case Kind::sbb: return "sbb(" + std::to_string(n) + ")";
    case Kind::poly: return "poly(" + std::to_string(n) + "," + std::to_string(l) + ")";
    case Kind::psi: return "psi(" + std::to_string(n) + "," + std::to_string(l) + ")";
  }
  return "?";
}

CornerSpec parse_corner(std::string_view text, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "corner dimension must be >= 1");
  CornerSpec s;
  s.n = n;
  if (text == "sbb") return s;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::parse_error, "bad corner: " + std::string(text));
  const auto kind = text.substr(0, colon);
  if (kind == "poly") s.kind = CornerSpec::Kind::poly;
  else if (kind == "psi") s.kind = CornerSpec::Kind::psi;
  else throw Error(ErrorCode::parse_error, "bad corner: " + std::string(text));
  try {
    std::size_t used = 0;
    const std::string arg(text.substr(colon + 1));
    s.l = std::stoi(arg, &used);
    if (used != arg.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::parse_error, "bad corner parameter: " + std::string(text));
  }
  if (s.l < 1) throw Error(ErrorCode::invalid_argument, "corner parameter must be >= 1");
  return s;
}

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::in: return "IN";
    case Membership::out: return "OUT";
    case Membership::unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

constexpr std::size_t kExactBits = 1u << 20;

Membership from_less(std::optional<Ordering> o) {
  if (!o) return Membership::unknown;
  return *o == Ordering::less ? Membership::in : Membership::out;
}

Membership both(Membership a, Membership b) {
  if (a == Membership::out || b == Membership::out) return Membership::out;
  if (a == Membership::unknown || b == Membership::unknown) return Membership::unknown;
  return Membership::in;
}

CertReal power(const CertReal& x, int l, long bits) {
  CertReal r = x;
  for (int i = 1; i < l; ++i) r = mul(r, x, bits);
  return r;
}

Membership positive(const Scalar& x) { return scalar_compare(x, Scalar(0)) == Ordering::greater ? Membership::in : Membership::out; }

}  // namespace

Membership link_holds(const Scalar& lower, const Scalar& upper, const CornerSpec& spec, long ceiling_bits) {
  switch (spec.kind) {
    case CornerSpec::Kind::sbb:
      return scalar_less(Rational(2) * lower, upper) ? Membership::in : Membership::out;
    case CornerSpec::Kind::poly: {
      if (auto lo = lower.to_rational(kExactBits), up = upper.to_rational(kExactBits); lo && up) {
        Rational p = 1;
        for (int i = 0; i < spec.l; ++i) p *= *up;
        return *lo < p ? Membership::in : Membership::out;
      }
      return from_less(refine_compare(
          [&](long bits) { return std::pair{lower.to_cert(bits), power(upper.to_cert(bits), spec.l, bits)}; },
          ceiling_bits));
    }
    case CornerSpec::Kind::psi: {
      if (scalar_compare(upper, Scalar(0)) != Ordering::greater) return Membership::out;
      if (auto t = as_tower(upper); t && t->below_one()) {
        const Scalar bound(psi_iter(*t, spec.l));
        try {
          return scalar_compare(lower, bound, ceiling_bits) == Ordering::less ? Membership::in : Membership::out;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::incomparable) throw;
          return Membership::unknown;
        }
      }
      return from_less(refine_compare(
          [&](long bits) { return std::pair{lower.to_cert(bits), psi_iter(upper.to_cert(bits), spec.l, bits)}; },
          ceiling_bits));
    }
  }
  return Membership::unknown;
}

Membership corner_membership(const std::vector<Scalar>& v, const CornerSpec& spec, long ceiling_bits) {
  if (static_cast<int>(v.size()) != spec.n)
    throw Error(ErrorCode::invalid_argument, "vector length " + std::to_string(v.size()) + " != corner dimension " + std::to_string(spec.n));
  Membership m = positive(v.back());
  if (spec.kind == CornerSpec::Kind::poly)
    for (const auto& x : v) m = both(m, positive(x));
  for (std::size_t i = 0; i + 1 < v.size() && m != Membership::out; ++i)
    m = both(m, link_holds(v[i + 1], v[i], spec, ceiling_bits));
  return m;
}

SortReduction sort_reduce(const std::vector<Scalar>& v) {
  struct Entry {
    Scalar abs;
    int index;
    int sign;
  };
  std::vector<Entry> nz;
  std::vector<int> zeros;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    const Ordering o = scalar_compare(v[static_cast<std::size_t>(i)], Scalar(0));
    if (o == Ordering::equal) zeros.push_back(i);
    else if (o == Ordering::greater) nz.push_back({v[static_cast<std::size_t>(i)], i, 1});
    else nz.push_back({-v[static_cast<std::size_t>(i)], i, -1});
  }
  std::stable_sort(nz.begin(), nz.end(), [](const Entry& a, const Entry& b) { return scalar_less(b.abs, a.abs); });
  for (std::size_t i = 1; i < nz.size(); ++i)
    if (scalar_eq(nz[i - 1].abs, nz[i].abs))
      throw Error(ErrorCode::tie, "coordinates " + std::to_string(nz[i - 1].index) + " and " + std::to_string(nz[i].index) +
                                      " have equal magnitude " + to_string(nz[i].abs));
  SortReduction r;
  std::vector<int> perm, signs;
  for (const auto& e : nz) {
    r.w.push_back(e.abs);
    perm.push_back(e.index);
    signs.push_back(e.sign);
  }
  for (int z : zeros) {
    perm.push_back(z);
    signs.push_back(1);
  }
  r.m = static_cast<int>(nz.size());
  r.element = v.empty() ? SymmetryElement{} : signed_permutation(perm, signs);
  return r;
}

// ---------------------------------------------------------------------------
// Scale lemma

std::string_view to_string(ScaleForm f) noexcept {
  switch (f) {
    case ScaleForm::differences: return "differences";
    case ScaleForm::differences_literal_band: return "differences-literal-band";
    case ScaleForm::points: return "points";
  }
  return "?";
}

ScaleForm parse_scale_form(std::string_view text) {
  if (text == "differences") return ScaleForm::differences;
  if (text == "differences-literal-band") return ScaleForm::differences_literal_band;
  if (text == "points") return ScaleForm::points;
  throw Error(ErrorCode::parse_error, "unknown scale-lemma form: " + std::string(text));
}

namespace {

Witness witness_of(const SortedValues& v, std::initializer_list<std::size_t> idx) {
  Witness w;
  for (std::size_t i : idx) {
    w.d.push_back(v.value(i));
    w.from.emplace_back(v.origin(i).hi, v.origin(i).lo);
  }
  return w;
}

void check_levels(const CantorSystem& sys, int K) {
  if (sys.rule() == GapRule::gap_encoded) throw Error(ErrorCode::invalid_argument, "needs a THEOREM_B or MIDDLE_THIRDS system");
  if (K < 1 || K > sys.max_depth()) throw Error(ErrorCode::depth_exceeded, "level K outside [1, max depth]");
}

}  // namespace

ScaleLemmaReport scale_lemma_check(const CantorSystem& sys, int K, int k, ScaleForm form, std::size_t max_witnesses) {
  check_levels(sys, K);
  if (k < 0 || k >= K) throw Error(ErrorCode::invalid_argument, "scale lemma needs 0 <= k < K");
  const auto points = level_endpoints(sys, K);
  const SortedValues v = form == ScaleForm::points ? SortedValues::positives(points, sys.regime())
                                                   : SortedValues::differences(points, sys.regime());
  const Scalar rk = sys.scale(k), rk1 = sys.scale(k + 1);
  const Scalar band_lo = form == ScaleForm::differences ? rk - Rational(2) * rk1 : rk - rk1;

  ScaleLemmaReport rep{sys.name(), K, k, form, v.size(), 0, 0, {}};
  const std::size_t in_box = v.count_leq(rk);
  const std::size_t small = v.count_leq(rk1);
  const std::size_t band_start = v.count_less(band_lo);
  for (std::size_t i = 0; i < in_box; ++i) {
    const std::size_t c = v.count_half_below(i);
    if (c == 0) continue;
    if (i < small) {
      rep.verified += c;
    } else if (i >= band_start) {
      const std::size_t ok = std::min(c, small);
      rep.verified += ok;
      rep.violated += c - ok;
      if (c > ok && rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(witness_of(v, {i, ok}));
    } else {
      rep.violated += c;
      if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(witness_of(v, {i, 0}));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Containment

AuditCounts& AuditCounts::merge(const AuditCounts& o) {
  verified += o.verified;
  violated += o.violated;
  unknown += o.unknown;
  witnesses.insert(witnesses.end(), o.witnesses.begin(), o.witnesses.end());
  return *this;
}

namespace {

// Tri-state comparison of x against g(t) for the corner's link function g,
// with g applied `times` times.
std::optional<Ordering> against_link(const Scalar& x, const Scalar& t, const CornerSpec& spec, int times, long ceiling) {
  if (spec.kind == CornerSpec::Kind::psi) {
    if (auto tw = as_tower(t); tw && tw->below_one()) {
      try {
        return scalar_compare(x, Scalar(psi_iter(*tw, static_cast<long>(spec.l) * times)), ceiling);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::incomparable) throw;
        return std::nullopt;
      }
    }
  }
  if (spec.kind == CornerSpec::Kind::poly) {
    if (auto xr = x.to_rational(kExactBits), tr = t.to_rational(kExactBits); xr && tr) {
      Rational p = *tr;
      for (int r = 0; r < times; ++r) {
        Rational q = 1;
        for (int i = 0; i < spec.l; ++i) q *= p;
        p = q;
      }
      const int c = cmp(*xr, p);
      return c < 0 ? Ordering::less : (c > 0 ? Ordering::greater : Ordering::equal);
    }
  }
  return refine_compare(
      [&](long bits) {
        CertReal g = t.to_cert(bits);
        for (int r = 0; r < times; ++r)
          g = spec.kind == CornerSpec::Kind::poly ? power(g, spec.l, bits) : psi_iter(g, spec.l, bits);
        return std::pair{x.to_cert(bits), g};
      },
      ceiling);
}

bool certainly_less(const std::optional<Ordering>& o) { return o && *o == Ordering::less; }

}  // namespace

DeltaChoice choose_delta(const CantorSystem& sys, int K, const CornerSpec& spec, long ceiling_bits) {
  if (spec.kind == CornerSpec::Kind::sbb) throw Error(ErrorCode::invalid_argument, "containment needs a POLY or PSI corner");
  auto good = [&](int k) {
    const Scalar rk = sys.scale(k), rk1 = sys.scale(k + 1);
    if (!certainly_less(against_link(rk1, rk, spec, 2, ceiling_bits))) return false;
    // g(r_k) < r_k - r_{k+1}  <=>  r_k - r_{k+1} > g(r_k)
    const auto o = against_link(rk - rk1, rk, spec, 1, ceiling_bits);
    return o && *o == Ordering::greater;
  };
  int first_good = K;
  while (first_good - 1 >= 1 && good(first_good - 1)) --first_good;
  if (first_good == K) return {sys.scale(1), 1, "fallback"};
  const int n = first_good - 1;
  return {sys.scale(n), n, "auto"};
}

namespace {

struct Split {
  std::size_t in_end = 0;   // [0, in_end): link certainly holds
  std::size_t out_begin = 0; // [out_begin, cap): link certainly fails
};

// Partitions lower values [0, cap) against g(value(upper)).
Split split_link(const SortedValues& v, std::size_t upper, std::size_t cap, const CornerSpec& spec, long ceiling) {
  std::vector<std::optional<Membership>> memo(cap);
  auto test = [&](std::size_t j) {
    if (!memo[j]) memo[j] = link_holds(v.value(j), v.value(upper), spec, ceiling);
    return *memo[j];
  };
  Split s;
  std::size_t lo = 0, hi = cap;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (test(mid) == Membership::in) lo = mid + 1; else hi = mid;
  }
  s.in_end = lo;
  hi = cap;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (test(mid) == Membership::out) hi = mid; else lo = mid + 1;
  }
  s.out_begin = lo;
  return s;
}

AuditCounts exhaustive_audit(const SortedValues& v, const Scalar& delta, const CornerSpec& spec, const AuditOptions& opt) {
  AuditCounts out;
  const std::size_t top = v.count_less(delta);
  if (spec.n == 1) {
    out.verified = top;
    return out;
  }
  std::vector<std::size_t> cap(top);
  std::vector<Split> split(top);
  for (std::size_t i = 0; i < top; ++i) {
    cap[i] = v.count_half_below(i);
    split[i] = split_link(v, i, cap[i], spec, opt.ceiling_bits);
  }
  auto note = [&](std::initializer_list<std::size_t> idx) {
    if (out.witnesses.size() < opt.max_witnesses) out.witnesses.push_back(witness_of(v, idx));
  };
  if (spec.n == 2) {
    for (std::size_t i = 0; i < top; ++i) {
      const Split& s = split[i];
      out.verified += s.in_end;
      out.unknown += s.out_begin - s.in_end;
      out.violated += cap[i] - s.out_begin;
      if (s.out_begin < cap[i]) note({i, s.out_begin});
    }
    return out;
  }
  // n = 3: per middle coordinate j, counts of last coordinates by verdict.
  std::vector<std::uint64_t> in3(top + 1, 0), unk3(top + 1, 0), out3(top + 1, 0);
  for (std::size_t j = 0; j < top; ++j) {
    in3[j + 1] = in3[j] + split[j].in_end;
    unk3[j + 1] = unk3[j] + (split[j].out_begin - split[j].in_end);
    out3[j + 1] = out3[j] + (cap[j] - split[j].out_begin);
  }
  auto range = [](const std::vector<std::uint64_t>& p, std::size_t a, std::size_t b) { return p[b] - p[a]; };
  for (std::size_t i = 0; i < top; ++i) {
    const std::size_t a = split[i].in_end, b = split[i].out_begin, c = cap[i];
    out.verified += range(in3, 0, a);
    out.unknown += range(unk3, 0, a) + range(in3, a, b) + range(unk3, a, b);
    out.violated += range(out3, 0, b) + range(in3, b, c) + range(unk3, b, c) + range(out3, b, c);
    if (out.witnesses.size() < opt.max_witnesses) {
      for (std::size_t j = b; j < c; ++j)
        if (cap[j] > 0) {
          note({i, j, 0});
          break;
        }
      for (std::size_t j = 0; j < b && out.witnesses.size() < opt.max_witnesses; ++j)
        if (split[j].out_begin < cap[j]) {
          note({i, j, split[j].out_begin});
          break;
        }
    }
  }
  return out;
}

// Sampled mode: boxes of differences of component pairs, refined on demand.
struct BoxCoord {
  Interval x;
  Interval y;
  int level;
};

enum class BoxVerdict { skip, in, out, unknown };

class BoxAuditor {
 public:
  BoxAuditor(const CantorSystem& sys, const Scalar& delta, const CornerSpec& spec, const AuditOptions& opt)
      : sys_(sys), delta_(delta), spec_(spec), opt_(opt) {}

  BoxVerdict run(const std::vector<BoxCoord>& box, int refine_left, Witness* w) const {
    const BoxVerdict v = decide(box, w);
    if (v != BoxVerdict::unknown || refine_left == 0) return v;
    bool all_skip = true, all_in_or_skip = true;
    std::vector<std::vector<BoxCoord>> subs{{}};
    for (const auto& c : box) {
      std::vector<std::vector<BoxCoord>> next;
      for (const auto& s : subs)
        for (const auto& cx : children(c.x, c.level))
          for (const auto& cy : children(c.y, c.level)) {
            auto t = s;
            t.push_back({cx, cy, c.level + 1});
            next.push_back(std::move(t));
          }
      subs = std::move(next);
    }
    for (const auto& s : subs) {
      const BoxVerdict sv = run(s, refine_left - 1, w);
      if (sv == BoxVerdict::out) return BoxVerdict::out;
      if (sv != BoxVerdict::skip) all_skip = false;
      if (sv == BoxVerdict::unknown) all_in_or_skip = false;
    }
    if (all_skip) return BoxVerdict::skip;
    return all_in_or_skip ? BoxVerdict::in : BoxVerdict::unknown;
  }

 private:
  std::vector<Interval> children(const Interval& c, int level) const {
    const Scalar r1 = sys_.scale(level + 1);
    return {{c.lo, c.lo + r1}, {c.hi - r1, c.hi}};
  }

  BoxVerdict decide(const std::vector<BoxCoord>& box, Witness* w) const {
    const std::size_t n = box.size();
    std::vector<Scalar> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = box[i].x.lo - box[i].y.hi;
      hi[i] = box[i].x.hi - box[i].y.lo;
    }
    // Filter (0, delta)^n and S_n.
    bool filter_out = !scalar_less(Scalar(0), hi[n - 1]) || !scalar_less(lo[0], delta_);
    bool filter_in = scalar_less(Scalar(0), lo[n - 1]) && scalar_less(hi[0], delta_);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!scalar_less(Rational(2) * lo[i + 1], hi[i])) filter_out = true;
      if (!scalar_less(Rational(2) * hi[i + 1], lo[i])) filter_in = false;
    }
    if (filter_out) return BoxVerdict::skip;
    bool spec_in = scalar_less(Scalar(0), lo[n - 1]);
    bool spec_out = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (spec_in && link_holds(hi[i + 1], lo[i], spec_, opt_.ceiling_bits) != Membership::in) spec_in = false;
      if (!spec_out && scalar_less(Scalar(0), lo[i]) &&
          link_holds(lo[i + 1], hi[i], spec_, opt_.ceiling_bits) == Membership::out)
        spec_out = true;
    }
    if (spec_in) return BoxVerdict::in;
    if (filter_in && spec_out) {
      if (w) {
        w->d.clear();
        w->from.clear();
        for (const auto& c : box) {
          w->d.push_back(c.x.lo - c.y.lo);
          w->from.emplace_back(c.x.lo, c.y.lo);
        }
      }
      return BoxVerdict::out;
    }
    return BoxVerdict::unknown;
  }

  const CantorSystem& sys_;
  Scalar delta_;
  CornerSpec spec_;
  AuditOptions opt_;
};

AuditCounts sampled_audit(const CantorSystem& sys, int K, const Scalar& delta, const CornerSpec& spec, const AuditOptions& opt) {
  AuditCounts out;
  const auto& comps = sys.level_set(K).components();
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, comps.size() - 1);
  const BoxAuditor auditor(sys, delta, spec, opt);
  for (std::uint64_t s = 0; s < opt.max_pairs; ++s) {
    std::vector<BoxCoord> box;
    for (int i = 0; i < spec.n; ++i) box.push_back({comps[pick(rng)], comps[pick(rng)], K});
    Witness w;
    switch (auditor.run(box, opt.refine, &w)) {
      case BoxVerdict::skip: break;
      case BoxVerdict::in: ++out.verified; break;
      case BoxVerdict::unknown: ++out.unknown; break;
      case BoxVerdict::out:
        ++out.violated;
        if (out.witnesses.size() < opt.max_witnesses) out.witnesses.push_back(std::move(w));
        break;
    }
  }
  return out;
}

}  // namespace

AuditReport containment_audit(const CantorSystem& sys, int K, const CornerSpec& spec, const AuditOptions& opt) {
  check_levels(sys, K);
  if (spec.kind == CornerSpec::Kind::sbb) throw Error(ErrorCode::invalid_argument, "containment needs a POLY or PSI corner");
  if (spec.n < 1 || spec.n > 3) throw Error(ErrorCode::unsupported_dimension, "containment audits support n <= 3");
  AuditReport rep;
  rep.system = sys.name();
  rep.K = K;
  rep.spec = spec;
  rep.mode = opt.mode;
  if (opt.delta) {
    if (scalar_compare(*opt.delta, Scalar(0)) != Ordering::greater) throw Error(ErrorCode::invalid_argument, "delta must be > 0");
    rep.delta = {*opt.delta, -1, "explicit"};
  } else {
    rep.delta = choose_delta(sys, K, spec, opt.ceiling_bits);
  }
  if (opt.mode == AuditMode::exhaustive) {
    const SortedValues v = SortedValues::differences(level_endpoints(sys, K), sys.regime());
    rep.values = v.size();
    rep.counts = exhaustive_audit(v, rep.delta.delta, spec, opt);
  } else {
    rep.counts = sampled_audit(sys, K, rep.delta.delta, spec, opt);
  }
  return rep;
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const Witness& w) {
  j = {{"d", w.d}};
  auto& from = j["from"] = nlohmann::json::array();
  for (const auto& [hi, lo] : w.from) from.push_back({{"x", hi}, {"y", lo}});
}

void to_json(nlohmann::json& j, const ScaleLemmaReport& r) {
  j = {{"system", r.system}, {"K", r.K},           {"k", r.k},
       {"form", std::string(to_string(r.form))}, {"values", r.values}, {"verified", r.verified},
       {"violated", r.violated},                 {"passed", r.passed()}, {"witnesses", r.witnesses}};
}

void to_json(nlohmann::json& j, const AuditReport& r) {
  j = {{"system", r.system},
       {"K", r.K},
       {"corner", r.spec.name()},
       {"mode", r.mode == AuditMode::exhaustive ? "exhaustive" : "sampled"},
       {"delta", r.delta.delta},
       {"delta_index", r.delta.index},
       {"delta_source", r.delta.source},
       {"values", r.values},
       {"verified", r.counts.verified},
       {"violated", r.counts.violated},
       {"unknown", r.counts.unknown},
       {"passed", r.passed()},
       {"witnesses", r.counts.witnesses}};
}

void to_json(nlohmann::json& j, const SymmetryGroup& g) {
  j = {{"n", g.n}, {"order", g.elements.size()}, {"reading", g.reading}, {"covers_all_directions", g.covers_all_directions()}};
  auto& unc = j["uncovered_directions"] = nlohmann::json::array();
  for (const auto& d : g.covering)
    if (!d.covered) unc.push_back(d.direction);
}

}  // namespace sparse_forge
