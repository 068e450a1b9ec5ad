#include "sparse_forge/encode.hpp"

#include <algorithm>
#include <random>

namespace sparse_forge {

// ---------------------------------------------------------------------------
// Boundary transforms

GapDescriptor GapDescriptor::between(const Scalar& left, const Scalar& right) {
  if (!scalar_less(left, right)) throw Error(ErrorCode::invalid_argument, "gap needs left < right");
  return {left, right, (left + right) / Rational(2), right - left};
}

std::string_view to_string(BoundaryKind k) noexcept {
  switch (k) {
    case BoundaryKind::midpoints: return "midpoints";
    case BoundaryKind::left_endpoints: return "left-endpoints";
    case BoundaryKind::gap_lengths: return "gap-lengths";
  }
  return "?";
}

BoundaryKind parse_boundary_kind(std::string_view raw) {
  std::string text(raw);
  std::replace(text.begin(), text.end(), '_', '-');
  if (text == "midpoints") return BoundaryKind::midpoints;
  if (text == "left-endpoints") return BoundaryKind::left_endpoints;
  if (text == "gap-lengths") return BoundaryKind::gap_lengths;
  throw Error(ErrorCode::parse_error, "unknown boundary kind: " + std::string(text));
}

std::vector<GapDescriptor> gaps_of(const IntervalSet& a) {
  const auto& c = a.components();
  if (c.size() < 2) throw Error(ErrorCode::no_gaps, "set has " + std::to_string(c.size()) + " component(s)");
  std::vector<GapDescriptor> out;
  out.reserve(c.size() - 1);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) out.push_back(GapDescriptor::between(c[i].hi, c[i + 1].lo));
  return out;
}

std::vector<Scalar> boundary_extract(const IntervalSet& a, BoundaryKind kind) {
  std::vector<Scalar> out;
  for (const auto& g : gaps_of(a)) {
    switch (kind) {
      case BoundaryKind::midpoints: out.push_back(g.midpoint); break;
      case BoundaryKind::left_endpoints: out.push_back(g.left); break;
      case BoundaryKind::gap_lengths: out.push_back(g.length); break;
    }
  }
  return out;
}

IntervalSet reconstruct_from_gaps(const Interval& hull, std::vector<GapDescriptor> gaps) {
  if (scalar_less(hull.hi, hull.lo)) throw Error(ErrorCode::invalid_argument, "hull has lo > hi");
  for (const auto& g : gaps) {
    if (!scalar_less(g.left, g.right)) throw Error(ErrorCode::invalid_argument, "gap with left >= right");
    if (scalar_less(g.left, hull.lo) || scalar_less(hull.hi, g.right))
      throw Error(ErrorCode::invalid_argument, "gap (" + to_string(g.left) + ", " + to_string(g.right) + ") leaves the hull");
  }
  std::stable_sort(gaps.begin(), gaps.end(), [](const GapDescriptor& a, const GapDescriptor& b) { return scalar_less(a.left, b.left); });
  std::vector<Interval> parts;
  Scalar x = hull.lo;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (i > 0 && scalar_less(gaps[i].left, gaps[i - 1].right))
      throw Error(ErrorCode::overlapping_gaps, "gaps starting at " + to_string(gaps[i - 1].left) + " and " + to_string(gaps[i].left) + " overlap");
    parts.push_back({x, gaps[i].left});
    x = gaps[i].right;
  }
  parts.push_back({x, hull.hi});
  return normalize(std::move(parts));
}

// ---------------------------------------------------------------------------
// Factorial decoding

FactorialDecode decode_factorial(const std::vector<Scalar>& lengths) {
  std::vector<Integer> cand;
  for (const auto& s : lengths) {
    const auto q = s.to_rational();
    if (!q || q->get_num() != 1 || q->get_den() < 2) continue;
    cand.push_back(q->get_den());
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  // best[i]: ratio -> (chain length, predecessor) for chains ending at cand[i].
  struct Link {
    std::size_t len;
    std::size_t prev;
  };
  std::vector<std::map<Integer, Link>> best(cand.size());
  std::size_t best_len = 1, best_end = 0;
  Integer best_ratio = 0;
  for (std::size_t j = 0; j < cand.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (!mpz_divisible_p(cand[j].get_mpz_t(), cand[i].get_mpz_t())) continue;
      const Integer ratio = cand[j] / cand[i];
      if (ratio < 2) continue;
      std::size_t len = 2;
      if (auto it = best[i].find(ratio - 1); it != best[i].end()) len = it->second.len + 1;
      auto& slot = best[j][ratio];
      if (slot.len < len) slot = {len, i};
      // Prefer longer chains, then the smaller first element (earlier start).
      if (len > best_len) {
        best_len = len;
        best_end = j;
        best_ratio = ratio;
      }
    }
  if (best_len < 2) throw Error(ErrorCode::no_chain, "fewer than two lengths form a factorial chain");

  FactorialDecode out;
  std::size_t j = best_end;
  Integer ratio = best_ratio;
  out.chain.push_back(cand[j]);
  for (std::size_t n = 1; n < best_len; ++n) {
    const Link link = best[j].at(ratio);
    out.nat_prefix.push_back(ratio);
    j = link.prev;
    ratio -= 1;
    out.chain.push_back(cand[j]);
  }
  std::reverse(out.chain.begin(), out.chain.end());
  out.nat_prefix.push_back(0);
  std::reverse(out.nat_prefix.begin(), out.nat_prefix.end());
  return out;
}

std::vector<Rational> factorial_lengths(int n_max) {
  if (n_max < 2) throw Error(ErrorCode::invalid_argument, "n_max must be >= 2");
  std::vector<Rational> out;
  Integer f = 1;
  for (int n = 2; n <= n_max; ++n) {
    f *= n;
    out.emplace_back(Integer(1), f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Packing

Scalar t_pack_value(const Tuple5& x) {
  Scalar t(0);
  for (std::size_t i = 0; i < x.size(); ++i) t = t + Rational(Integer(1) << static_cast<unsigned>(i)) * x[i];
  return t;
}

namespace {

bool same_tuple(const Tuple5& a, const Tuple5& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!scalar_eq(a[i], b[i])) return false;
  return true;
}

}  // namespace

void PackRegistry::insert(const Scalar& packed, const Tuple5& x) {
  std::lock_guard lock(mu_);
  auto [it, fresh] = map_.try_emplace(packed, x);
  if (!fresh && !same_tuple(it->second, x))
    throw Error(ErrorCode::collision, "two tuples pack to " + to_string(packed));
}

Tuple5 PackRegistry::lookup(const Scalar& packed) const {
  std::lock_guard lock(mu_);
  auto it = map_.find(packed);
  if (it == map_.end()) throw Error(ErrorCode::not_found, "no tuple packs to " + to_string(packed));
  return it->second;
}

std::size_t PackRegistry::size() const {
  std::lock_guard lock(mu_);
  return map_.size();
}

Scalar t_pack(const Tuple5& x, PackRegistry& reg) {
  Scalar t = t_pack_value(x);
  reg.insert(t, x);
  return t;
}

Tuple5 t_unpack(const Scalar& t, const PackRegistry& reg) { return reg.lookup(t); }

// ---------------------------------------------------------------------------
// Codec

Rational sigma(const Rational& x) { return Rational(1, 2) + x / (2 * (1 + abs(x))); }

Rational sigma_inverse(const Rational& y) {
  if (y <= 0 || y >= 1) throw Error(ErrorCode::invalid_argument, "sigma inverse needs 0 < y < 1");
  const Rational u = 2 * y - 1;
  return u / (1 - abs(u));
}

Address g_encode(const Rational& x, int K) {
  if (K < 0) throw Error(ErrorCode::invalid_argument, "depth must be >= 0");
  Rational y = sigma(x);
  Address a;
  a.reserve(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    y *= 2;
    if (y >= 1) {
      a.push_back('1');
      y -= 1;
    } else {
      a.push_back('0');
    }
  }
  return a;
}

Rational g_decode(const Address& addr) {
  Rational y = 0, w = 1;
  for (char c : addr) {
    w /= 2;
    if (c == '1') y += w;
    else if (c != '0') throw Error(ErrorCode::parse_error, "address digits must be 0 or 1");
  }
  return sigma_inverse(y + w / 2);
}

Rational g_error_bound(const Rational& x, int K) {
  const Rational s = 1 + abs(x);
  return 2 * pow2(-K) * s * s;
}

Interval g_image(const CantorSystem& sys, const Rational& x, int K) { return address_interval(sys, g_encode(x, K)); }

Rational dis_nat(const Rational& x) {
  if (x < 0) return -x;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  const Rational frac = x - Rational(fl);
  const Rational rest = 1 - frac;
  return std::min(frac, rest);
}

std::array<Address, 5> x_tuple(const Rational& x, const Rational& y, int K) {
  return {g_encode(x, K), g_encode(y, K), g_encode(x + y, K), g_encode(x * y, K), g_encode(dis_nat(x), K)};
}

// ---------------------------------------------------------------------------
// K-demo

KDemo k_demo(const CantorSystem& sys, int K, std::size_t samples, std::uint64_t seed) {
  const IntervalSet& level = sys.level_set(K);
  KDemo demo;
  std::vector<Interval> shifted;
  Scalar widest(0);
  for (const auto& c : level.components()) {
    shifted.push_back({c.lo + Scalar(1), c.hi + Scalar(1)});
    if (scalar_less(widest, c.hi - c.lo)) widest = c.hi - c.lo;
  }
  demo.base = normalize(std::move(shifted));
  demo.tolerance = Rational(31) * widest;

  const auto& comps = demo.base.components();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, comps.size() - 1);
  PackRegistry reg;
  for (std::size_t s = 0; s < samples; ++s) {
    Tuple5 x;
    for (auto& xi : x) xi = comps[pick(rng)].hi;
    demo.packed.push_back(t_pack(x, reg));
    demo.samples.push_back(std::move(x));
  }
  return demo;
}

void to_json(nlohmann::json& j, const GapDescriptor& g) {
  j = {{"left", g.left}, {"right", g.right}, {"midpoint", g.midpoint}, {"length", g.length}};
}

void to_json(nlohmann::json& j, const FactorialDecode& d) {
  auto ints = [](const std::vector<Integer>& v) {
    auto a = nlohmann::json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
  };
  j = {{"A", ints(d.chain)}, {"nat_prefix", ints(d.nat_prefix)}};
}

void to_json(nlohmann::json& j, const KDemo& d) {
  j = {{"base", d.base}, {"packed", d.packed}, {"tolerance", d.tolerance}};
  auto& s = j["samples"] = nlohmann::json::array();
  for (const auto& t : d.samples) s.push_back(nlohmann::json(std::vector<Scalar>(t.begin(), t.end())));
}

}  // namespace sparse_forge
