// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "oracles.hpp"

#include "sparse_forge/corners.hpp"
#include "sparse_forge/encode.hpp"
#include "sparse_forge/sparsity.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace sparse_forge;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Every profile built during the run, for the monotonicity criterion.
std::vector<CoveringProfile> emitted;

const CoveringProfile& keep(CoveringProfile p) {
  emitted.push_back(std::move(p));
  return emitted.back();
}

std::vector<std::pair<Rational, Rational>> parts_of(const IntervalSet& s) {
  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& c : s.components()) out.emplace_back(*c.lo.to_rational(), *c.hi.to_rational());
  return out;
}

Outcome census() {
  const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 10);
  for (int k = 0; k <= 10; ++k) {
    const IntervalSet& e = sys.level_set(k);
    if (e.size() != (std::size_t{1} << k)) return {false, "level " + std::to_string(k) + " has " + std::to_string(e.size())};
    const Scalar rk = sys.scale(k);
    for (const auto& c : e.components())
      if (!scalar_eq(c.hi - c.lo, rk)) return {false, "level " + std::to_string(k) + " has a component of the wrong length"};
  }
  return {true, "levels 0..10: 2^k components of length r_k"};
}

Outcome covering_oracle() {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    std::vector<Interval> parts;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const Rational a = oracle::random_rational(rng, 0, 4, 24);
      const Rational len = oracle::random_rational(rng, 0, 1, 24);
      parts.push_back({Scalar(a), Scalar(Rational(a + len))});
    }
    const IntervalSet s = normalize(parts);
    Rational r = oracle::random_rational(rng, 0, 1, 30);
    if (r == 0) r = Rational(1, 31);
    const auto greedy = covering_number(s, r);
    const auto brute = oracle::min_cover(parts_of(s), r);
    if (greedy != brute) {
      std::ostringstream m;
      m << "case " << t << ": greedy " << greedy << " vs brute force " << brute;
      return {false, m.str()};
    }
  }
  return {true, "200 random sets agree with brute force"};
}

Outcome closed_form() {
  std::size_t checked = 0;
  for (int K = 1; K <= 10; ++K) {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, K);
    std::vector<int> ks;
    for (int k = 0; k < K; ++k) ks.push_back(k);
    // verify = true recomputes every entry greedily and throws on mismatch.
    const auto& p = keep(theorem_b_profile(sys, K, ks, true));
    for (std::size_t i = 0; i < ks.size(); ++i, ++checked)
      if (p.entries[i].n != (std::uint64_t{2} << ks[i])) return {false, "K=" + std::to_string(K) + " k=" + std::to_string(ks[i])};
  }
  return {true, std::to_string(checked) + " (K, k) pairs, greedy = closed form = 2^(k+1)"};
}

Outcome step_bound() {
  const auto sys = CantorSystem::theorem_b(Regime::tower_fast, 13);
  std::size_t certified = 0;
  for (int m = 0; m <= 3; ++m) {
    const NullReport r = null_diagnostic(sys, m, 3, 12);
    if (r.unknown) return {false, "m=" + std::to_string(m) + ": " + std::to_string(r.unknown) + " UNKNOWN"};
    if (r.first_failure) return {false, "m=" + std::to_string(m) + " fails at k=" + std::to_string(*r.first_failure)};
    certified += r.entries.size();
  }
  return {true, std::to_string(certified) + " certified entries, m <= 3, 3 <= k <= 12"};
}

Outcome scale_lemma() {
  std::uint64_t verified = 0;
  for (Regime reg : {Regime::rational_fast, Regime::tower_fast}) {
    const auto sys = CantorSystem::theorem_b(reg, 8);
    for (int k = 1; k < 8; ++k) {
      const auto r = scale_lemma_check(sys, 8, k);
      if (!r.passed()) return {false, std::string(to_string(reg)) + " k=" + std::to_string(k) + ": " + std::to_string(r.violated) + " violations"};
      verified += r.verified;
    }
  }
  const auto mt = scale_lemma_check(CantorSystem::middle_thirds(8), 8, 1);
  if (mt.violated == 0 || mt.witnesses.empty()) return {false, "middle-thirds control produced no counterexample"};
  return {true, std::to_string(verified) + " pairs verified in both regimes; middle-thirds: " + std::to_string(mt.violated) + " counterexamples"};
}

Outcome containment() {
  const CornerSpec corner = parse_corner("poly:2", 2);
  const auto rep = containment_audit(CantorSystem::theorem_b(Regime::rational_fast, 6), 6, corner);
  if (!rep.passed() || rep.counts.unknown) return {false, std::to_string(rep.counts.violated) + " violations"};
  const auto mt = containment_audit(CantorSystem::middle_thirds(6), 6, corner);
  if (mt.passed() || mt.counts.witnesses.empty()) return {false, "middle-thirds control produced no witness"};
  if (corner_membership(mt.counts.witnesses.front().d, corner) != Membership::out) return {false, "control witness is not outside the corner"};
  return {true, std::to_string(rep.counts.verified) + " vectors verified, delta " + to_string(rep.delta.delta) + "; control: " +
                    std::to_string(mt.counts.violated) + " violations"};
}

Outcome box_dimension() {
  const auto mt = CantorSystem::middle_thirds(12);
  std::vector<Scalar> radii;
  Rational r(1, 81);
  for (int i = 4; i <= 12; ++i, r /= 3) radii.emplace_back(r);
  const double slope = box_dim_estimate(keep(covering_profile(mt.level_set(12), radii))).slope.get_d();
  if (std::abs(slope - 0.6309) > 0.02) return {false, "middle-thirds slope " + std::to_string(slope)};

  const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 10);
  const auto& full = keep(theorem_b_profile(sys, 10, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, false));
  std::ostringstream m;
  m << "middle-thirds " << slope << "; construction windows:";
  Rational prev = 1;
  for (std::size_t a = 0; a + 2 < full.entries.size(); ++a) {
    const Rational s = box_dim_estimate(keep(window(full, a, a + 2))).slope;
    m << " " << s.get_d();
    if (s > Rational(15, 100)) return {false, m.str() + " exceeds 0.15"};
    if (!(s < prev)) return {false, m.str() + " not decreasing"};
    prev = s;
  }
  return {true, m.str()};
}

Outcome encoding() {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<Interval> parts;
    const int n = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      const Rational a = oracle::random_rational(rng, 0, 10, 60);
      parts.push_back({Scalar(a), Scalar(Rational(a + oracle::random_rational(rng, 0, 1, 60)))});
    }
    const IntervalSet s = normalize(parts);
    if (s.size() < 2) continue;
    const Interval hull{s.components().front().lo, s.components().back().hi};
    if (!(reconstruct_from_gaps(hull, gaps_of(s)) == s)) return {false, "round trip failed on random set " + std::to_string(t)};
  }

  const auto fd = decode_factorial(boundary_extract(gap_encoded_set(factorial_lengths(5), 2), BoundaryKind::gap_lengths));
  if (fd.chain != std::vector<Integer>{2, 6, 24, 120} || fd.nat_prefix != std::vector<Integer>{0, 3, 4, 5})
    return {false, "factorial decode mismatch"};

  // COLLISION would propagate as an exception.
  const KDemo demo = k_demo(CantorSystem::theorem_b(Regime::rational_fast, 8), 8, 10000, 77);
  if (demo.packed.size() != 10000) return {false, "k-demo packed " + std::to_string(demo.packed.size())};

  for (int t = 0; t < 100; ++t) {
    const Rational x = oracle::random_rational(rng, -50, 50, 1009);
    if (abs(g_decode(g_encode(x, 24)) - x) > g_error_bound(x, 24)) return {false, "codec bound fails at " + x.get_str()};
    const Rational y = oracle::random_rational(rng, -50, 50, 1009);
    if (abs(g_decode(x_tuple(x, y, 24)[2]) - (x + y)) > g_error_bound(x + y, 24)) return {false, "x-tuple sum fails at " + x.get_str()};
  }
  return {true, "100 set round trips, factorial chain {2,6,24,120}, 10^4 packed tuples, 100 codec and sum checks"};
}

Outcome consistency() {
  std::mt19937_64 rng(9);
  // Pool of exact scalars of every kind that compare within one regime.
  std::vector<Scalar> pool;
  const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
  const auto ends = level_endpoints(sys, 6);
  for (std::size_t i = 0; i < ends.size(); i += 3) pool.push_back(ends[i]);
  for (std::size_t i = 0; i + 5 < ends.size(); i += 11) pool.push_back(ends[i + 5] - ends[i]);
  for (int i = 0; i < 40; ++i) pool.emplace_back(oracle::random_rational(rng, -1, 1, 4099));
  const auto tsys = CantorSystem::theorem_b(Regime::tower_fast, 5);
  for (int k = 0; k <= 5; ++k) pool.push_back(tsys.scale(k));
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int t = 0; t < 10000; ++t) {
    const Scalar &a = pool[pick(rng)], &b = pool[pick(rng)], &c = pool[pick(rng)];
    const Ordering ab = scalar_compare(a, b), bc = scalar_compare(b, c), ac = scalar_compare(a, c);
    if (scalar_compare(b, a) != (ab == Ordering::less ? Ordering::greater : ab == Ordering::greater ? Ordering::less : Ordering::equal))
      return {false, "antisymmetry fails: " + to_string(a) + " vs " + to_string(b)};
    if (ab != Ordering::greater && bc != Ordering::greater && ac == Ordering::greater)
      return {false, "transitivity fails: " + to_string(a) + ", " + to_string(b) + ", " + to_string(c)};
  }

  const CornerSpec psi = parse_corner("psi:1", 2);
  std::size_t unknown = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<Scalar> v{oracle::random_rational(rng, 0, 1, 997), 0};
    // Half the samples sit next to the link curve.
    if (t % 2) {
      const Rational x = *v[0].to_rational();
      if (x > 0) {
        const Enclosure e = psi_iter_eval({1}, x, pow2(-160));
        const long spread = 36 + 30 * (t % 4);
        v[1] = Scalar(Rational(e.midpoint() + oracle::random_rational(rng, -1, 1, 1 << 20) * pow2(-spread)));
      }
    } else {
      v[1] = oracle::random_rational(rng, 0, 1, 997);
    }
    std::optional<Membership> seen;
    for (long bits : {48L, 96L, 256L, 1024L}) {
      const Membership m = corner_membership(v, psi, bits);
      if (m == Membership::unknown) {
        ++unknown;
        continue;
      }
      if (seen && *seen != m) return {false, "membership flipped for (" + to_string(v[0]) + ", " + to_string(v[1]) + ")"};
      seen = m;
    }
  }

  for (const auto& p : emitted) {
    for (std::size_t i = 1; i < p.entries.size(); ++i) {
      // Radii decrease along the list, so counts may not.
      if (!scalar_less(p.entries[i].r, p.entries[i - 1].r) || p.entries[i].n < p.entries[i - 1].n)
        return {false, "profile not monotone"};
    }
  }
  return {true, "10^4 triples, 10^3 PSI vectors (" + std::to_string(unknown) + " coarse UNKNOWN, no flips), " +
                    std::to_string(emitted.size()) + " profiles monotone"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "component census", 5, census},
      {2, "covering oracle equivalence", 30, covering_oracle},
      {3, "closed-form agreement", 10, closed_form},
      {4, "tower null bound", 60, step_bound},
      {5, "scale lemma", 60, scale_lemma},
      {6, "containment audit", 120, containment},
      {7, "box dimension", 30, box_dimension},
      {8, "encoding round trips", 60, encoding},
      {9, "monotonicity and consistency", 60, consistency},
  };
  int failures = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > c.budget_s) o = {false, o.detail + "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget"};
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << "criterion " << c.id << " [" << c.name << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << secs << " s) " << o.detail;
    std::cout << line.str() << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
