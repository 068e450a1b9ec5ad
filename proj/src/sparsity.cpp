#include "sparse_forge/sparsity.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sparse_forge {

std::string_view to_string(CoverMethod m) noexcept {
  switch (m) {
    case CoverMethod::greedy_exact: return "GREEDY_EXACT";
    case CoverMethod::closed_form: return "CLOSED_FORM";
    case CoverMethod::bound: return "BOUND";
  }
  return "?";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::unknown: return "UNKNOWN";
  }
  return "?";
}

void check_profile(const CoveringProfile& p) {
  for (std::size_t i = 1; i < p.entries.size(); ++i) {
    if (!scalar_less(p.entries[i].r, p.entries[i - 1].r))
      throw Error(ErrorCode::invalid_argument, "profile radii must strictly decrease");
    if (p.entries[i].n < p.entries[i - 1].n) throw Error(ErrorCode::invalid_argument, "profile counts must not decrease");
  }
}

CoveringProfile covering_profile(const IntervalSet& a, const std::vector<Scalar>& radii) {
  CoveringProfile p;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && !scalar_less(radii[i], radii[i - 1]))
      throw Error(ErrorCode::invalid_argument, "radii must be strictly decreasing");
    p.entries.push_back({radii[i], covering_number(a, radii[i]), CoverMethod::greedy_exact});
  }
  return p;
}

CoveringProfile theorem_b_profile(const CantorSystem& sys, int K, const std::vector<int>& ks, bool verify) {
  if (sys.rule() != GapRule::theorem_b) throw Error(ErrorCode::invalid_argument, "closed form needs a THEOREM_B system");
  CoveringProfile p;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    if (k < 0 || k + 1 > K) throw Error(ErrorCode::invalid_argument, "closed form needs 0 <= k < K");
    if (i > 0 && k <= ks[i - 1]) throw Error(ErrorCode::invalid_argument, "closed-form indices must increase");
    ProfileEntry e{sys.scale(k + 1), std::uint64_t{1} << (k + 1), CoverMethod::closed_form};
    if (verify) {
      const std::uint64_t greedy = covering_number(sys.level_set(K), e.r);
      if (greedy != e.n)
        throw Error(ErrorCode::invalid_argument, "closed form " + std::to_string(e.n) + " disagrees with greedy " +
                                                     std::to_string(greedy) + " at k=" + std::to_string(k));
    }
    p.entries.push_back(std::move(e));
  }
  return p;
}

CoveringProfile window(const CoveringProfile& p, std::size_t first, std::size_t last) {
  if (first > last || last >= p.entries.size()) throw Error(ErrorCode::invalid_argument, "window out of range");
  CoveringProfile w;
  w.entries.assign(p.entries.begin() + static_cast<long>(first), p.entries.begin() + static_cast<long>(last) + 1);
  return w;
}

namespace {

// log x as a multiple of 2^-bits within 2^-bits of the true value.
Rational rounded_log(const std::function<CertReal(long)>& x, long bits) {
  for (long b = bits + 8; b <= 8 * bits + 64; b *= 2) {
    const CertReal l = log(x(b), b);
    if (!l.is_plain()) throw Error(ErrorCode::overflow, "log(1/r) beyond plain range; slope undefined");
    const Enclosure& e = l.enclosure();
    if (e.width() <= pow2(-bits - 1)) {
      const Rational scaled = e.midpoint() * pow2(bits);
      Integer f;
      mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      return Rational(f) * pow2(-bits);
    }
  }
  throw Error(ErrorCode::incomparable, "log enclosure did not reach requested width");
}

}  // namespace

DimensionEstimate box_dim_estimate(const CoveringProfile& p, long log_bits) {
  if (p.entries.size() < 3) throw Error(ErrorCode::invalid_argument, "slope needs at least 3 entries");
  std::vector<Rational> xs, ys;
  for (const auto& e : p.entries) {
    if (e.n < 1) throw Error(ErrorCode::invalid_argument, "slope needs N >= 1");
    xs.push_back(rounded_log([&](long b) { return reciprocal(e.r.to_cert(b), b); }, log_bits));
    const CertReal n = CertReal::exact(Rational(static_cast<unsigned long>(e.n)));
    ys.push_back(rounded_log([&](long) { return n; }, log_bits));
  }
  const auto n = static_cast<long>(xs.size());
  Rational mx = 0, my = 0;
  for (long i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  Rational sxx = 0, sxy = 0;
  for (long i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::degenerate, "all radii give the same log(1/r)");
  return {sxy / sxx, pow2(-log_bits), xs.size()};
}

namespace {

CertReal exp_iter(CertReal v, int m, long bits) {
  for (int i = 0; i < m; ++i) v = exp(v, bits);
  return v;
}

// r / psi_l(s), with equal towers cancelling exactly.
CertReal over_psi(const Scalar& r, const Scalar& s, int l, long bits) {
  const auto ts = as_tower(s);
  if (ts && ts->below_one()) {
    const TowerMag p = psi_iter(*ts, l);
    if (auto tr = as_tower(r); tr && *tr == p) return CertReal::exact(1);
    return div(r.to_cert(bits), p.to_cert(bits), bits);
  }
  return div(r.to_cert(bits), psi_iter(s.to_cert(bits), l, bits), bits);
}

}  // namespace

NullReport null_diagnostic(const CantorSystem& sys, int m, int k_lo, int k_hi, long ceiling_bits) {
  if (m < 0) throw Error(ErrorCode::invalid_argument, "m must be >= 0");
  if (k_lo < 1 || k_hi < k_lo) throw Error(ErrorCode::invalid_argument, "k range must satisfy 1 <= k_lo <= k_hi");
  NullReport rep{sys.name(), m, {}, std::nullopt, 0};
  for (int k = k_lo; k <= k_hi; ++k) {
    NullEntry e{k, Verdict::unknown, {}, {}};
    const Scalar rk1 = sys.scale(k + 1), rk = sys.scale(k), rkm1 = sys.scale(k - 1);
    auto make = [&](long bits) {
      Integer n = 1;
      n <<= static_cast<unsigned>(k + 1);
      const CertReal lhs = mul(rk1.to_cert(bits), exp_iter(CertReal::exact(Rational(n)), m, bits), bits);
      const CertReal rhs = over_psi(rk, rkm1, m + 1, bits);
      e.lhs = lhs.describe();
      e.rhs = rhs.describe();
      return std::pair{lhs, rhs};
    };
    if (auto o = refine_compare(make, ceiling_bits))
      e.verdict = *o == Ordering::greater ? Verdict::fail : Verdict::pass;
    if (e.verdict == Verdict::fail && !rep.first_failure) rep.first_failure = k;
    if (e.verdict == Verdict::unknown) ++rep.unknown;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

Scalar Modulus::apply(const Scalar& r) const {
  switch (kind) {
    case Kind::identity: return r;
    case Kind::scale: return factor * r;
    case Kind::power: {
      auto q = r.to_rational();
      if (!q) throw Error(ErrorCode::invalid_argument, "power modulus needs a materializable radius");
      Rational out = 1;
      for (long i = 0; i < exponent; ++i) out *= *q;
      return Scalar(out);
    }
  }
  return r;
}

std::string Modulus::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::power: return "pow:" + std::to_string(exponent);
    case Kind::scale: return "scale:" + to_pq(factor);
  }
  return "?";
}

Modulus parse_modulus(std::string_view text) {
  Modulus m;
  if (text == "identity") return m;
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::parse_error, "bad modulus: " + std::string(text));
  const auto kind = text.substr(0, colon);
  const std::string arg(text.substr(colon + 1));
  if (kind == "pow") {
    m.kind = Modulus::Kind::power;
    try {
      m.exponent = std::stol(arg);
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "bad power: " + arg);
    }
    if (m.exponent < 1) throw Error(ErrorCode::invalid_argument, "power must be >= 1");
  } else if (kind == "scale") {
    m.kind = Modulus::Kind::scale;
    m.factor = parse_rational(arg);
    if (m.factor <= 0) throw Error(ErrorCode::invalid_argument, "scale must be > 0");
  } else {
    throw Error(ErrorCode::parse_error, "bad modulus: " + std::string(text));
  }
  return m;
}

CoveringProfile modulus_pushforward(const CoveringProfile& p, const Modulus& phi) {
  CoveringProfile out;
  for (const auto& e : p.entries) out.entries.push_back({phi.apply(e.r), e.n, CoverMethod::bound});
  return out;
}

std::string profile_csv(const CoveringProfile& p) {
  std::ostringstream os;
  os << "r,N,method\n";
  for (const auto& e : p.entries) os << to_string(e.r) << ',' << e.n << ',' << to_string(e.method) << '\n';
  return os.str();
}

std::string profile_plot_csv(const CoveringProfile& p) {
  std::ostringstream os;
  os << "log_inv_r,log_N\n";
  for (const auto& e : p.entries) {
    const CertReal x = log(reciprocal(e.r.to_cert(64), 64), 64);
    const CertReal y = log(CertReal::exact(Rational(static_cast<unsigned long>(e.n))), 64);
    auto text = [](const CertReal& v) {
      if (!v.is_plain()) return v.describe();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", to_double(v.enclosure().midpoint()));
      return std::string(buf);
    };
    os << text(x) << ',' << text(y) << '\n';
  }
  return os.str();
}

void to_json(nlohmann::json& j, const CoveringProfile& p) {
  j = nlohmann::json::array();
  for (const auto& e : p.entries) j.push_back({{"r", e.r}, {"N", e.n}, {"method", std::string(to_string(e.method))}});
}

void to_json(nlohmann::json& j, const NullReport& r) {
  j = {{"system", r.system}, {"m", r.m}, {"passed", r.passed()}, {"unknown", r.unknown}};
  j["first_failure"] = r.first_failure ? nlohmann::json(*r.first_failure) : nlohmann::json(nullptr);
  auto& arr = j["trace"] = nlohmann::json::array();
  for (const auto& e : r.entries)
    arr.push_back({{"k", e.k}, {"verdict", std::string(to_string(e.verdict))}, {"lhs", e.lhs}, {"rhs", e.rhs}});
}

}  // namespace sparse_forge
