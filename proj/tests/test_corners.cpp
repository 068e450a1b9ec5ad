#include "doctest.h"
#include "oracles.hpp"

#include "sparse_forge/corners.hpp"

#include <cmath>
#include <set>

using namespace sparse_forge;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

double as_double(const QSqrt2& x) { return x.a.get_d() + x.b.get_d() * std::sqrt(2.0); }

std::vector<Scalar> vec(std::initializer_list<Rational> xs) { return {xs.begin(), xs.end()}; }

bool orthogonal(const SymmetryElement& t) { return compose(transpose(t), t) == identity_element(t.n); }

// All integer orthogonal n x n matrices, found by brute force over {-1,0,1}.
std::set<std::vector<int>> integer_orthogonal(int n) {
  std::set<std::vector<int>> out;
  const int cells = n * n;
  std::vector<int> m(cells, -1);
  while (true) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        int dot = 0;
        for (int k = 0; k < n; ++k) dot += m[k * n + i] * m[k * n + j];
        ok = dot == (i == j ? 1 : 0);
      }
    if (ok) out.insert(m);
    int i = 0;
    while (i < cells && m[i] == 1) m[i++] = -1;
    if (i == cells) break;
    ++m[i];
  }
  return out;
}

// Floating-point test of x in the closed corner with a small tolerance.
bool float_in_closed(const std::vector<double>& x) {
  if (x.back() < -1e-12) return false;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i] - 2 * x[i + 1] < -1e-12) return false;
  return true;
}

std::vector<double> float_apply_inverse(const SymmetryElement& t, const std::vector<int>& u) {
  std::vector<double> out(t.n, 0.0);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) out[i] += as_double(t.at(j, i)) * u[j];
  return out;
}

// Independent count of distinct difference pairs (d1, d2) with both in
// (0, delta), 0 < 2 d2 < d1, split by whether d2 < d1^l.
std::pair<std::uint64_t, std::uint64_t> oracle_poly_audit(const CantorSystem& sys, int K, const Rational& delta, int l) {
  std::set<Rational> d;
  const auto ends = level_endpoints(sys, K);
  for (const auto& x : ends)
    for (const auto& y : ends) {
      const Rational v = *x.to_rational() - *y.to_rational();
      if (v > 0 && v < delta) d.insert(v);
    }
  std::uint64_t good = 0, bad = 0;
  for (const auto& d1 : d)
    for (const auto& d2 : d) {
      if (!(2 * d2 < d1)) continue;
      Rational p = 1;
      for (int i = 0; i < l; ++i) p *= d1;
      (d2 < p ? good : bad) += 1;
    }
  return {good, bad};
}

}  // namespace

TEST_SUITE("quadratic field") {
  TEST_CASE("arithmetic") {
    const QSqrt2 r2{0, 1};
    CHECK(r2 * r2 == QSqrt2{2, 0});
    CHECK(QSqrt2{1, 1} * QSqrt2{1, -1} == QSqrt2{-1, 0});
    CHECK(QSqrt2{q(1, 2), 3} + QSqrt2{q(1, 2), -3} == QSqrt2{1, 0});
    CHECK(to_string(QSqrt2{q(1, 2), -1}) == "1/2-1/1*sqrt2");
    CHECK(to_string(QSqrt2{0, q(3, 2)}) == "3/2*sqrt2");
    CHECK(to_string(QSqrt2{2, 0}) == "2/1");
  }

  TEST_CASE("signs against floating point") {
    for (long a = -8; a <= 8; ++a)
      for (long b = -8; b <= 8; ++b) {
        const QSqrt2 x{a, b};
        const double f = static_cast<double>(a) + static_cast<double>(b) * std::sqrt(2.0);
        CHECK(sign(x) == (f > 0 ? 1 : f < 0 ? -1 : 0));
      }
    CHECK(sign(QSqrt2{-7, 5}) == 1);
    CHECK(sign(QSqrt2{3, -2}) == 1);
    CHECK(sign(QSqrt2{99, -70}) == 1);
    CHECK(sign(QSqrt2{-99, 70}) == -1);
  }
}

TEST_SUITE("symmetry groups") {
  TEST_CASE("orders") {
    CHECK(corner_symmetries(1).elements.size() == 2);
    CHECK(corner_symmetries(2).elements.size() == 16);
    CHECK(corner_symmetries(3).elements.size() == 48);
    CHECK(corner_symmetries(4).elements.size() == 384);
    CHECK_THROWS_AS(corner_symmetries(0), Error);
    CHECK_THROWS_AS(corner_symmetries(5), Error);
  }

  TEST_CASE("elements are orthogonal and the set is closed") {
    for (int n = 1; n <= 3; ++n) {
      const auto g = corner_symmetries(n);
      for (const auto& t : g.elements) {
        CHECK(orthogonal(t));
        const int det = sign(determinant(t));
        CHECK((det == 1 || det == -1));
      }
      for (const auto& a : g.elements)
        for (const auto& b : g.elements)
          CHECK(std::find(g.elements.begin(), g.elements.end(), compose(a, b)) != g.elements.end());
    }
  }

  TEST_CASE("octagon contains the 45 degree rotation") {
    const auto g = corner_symmetries(2);
    const Rational h(1, 2);
    const SymmetryElement rot{2, {{0, h}, {0, -h}, {0, h}, {0, h}}};
    CHECK(std::find(g.elements.begin(), g.elements.end(), rot) != g.elements.end());
    int rotations = 0;
    for (const auto& t : g.elements) rotations += sign(determinant(t)) == 1;
    CHECK(rotations == 8);
  }

  TEST_CASE("signed permutations match brute-force integer orthogonal maps") {
    for (int n = 3; n <= 3; ++n) {
      const auto want = integer_orthogonal(n);
      CHECK(want.size() == 48);
      const auto g = corner_symmetries(n);
      std::set<std::vector<int>> got;
      for (const auto& t : g.elements) {
        CHECK(t.is_signed_permutation());
        std::vector<int> m;
        for (const auto& e : t.m) m.push_back(static_cast<int>(e.a.get_d()));
        got.insert(m);
      }
      CHECK(got == want);
    }
  }

  TEST_CASE("direction coverage agrees with a floating-point check") {
    for (int n = 1; n <= 4; ++n) {
      const auto g = corner_symmetries(n);
      std::size_t expected = 1;
      for (int i = 0; i < n; ++i) expected *= 3;
      CHECK(g.covering.size() == expected - 1);
      for (const auto& dc : g.covering) {
        bool any = false;
        for (const auto& t : g.elements) any = any || float_in_closed(float_apply_inverse(t, dc.direction));
        CHECK(dc.covered == any);
      }
    }
    CHECK(corner_symmetries(1).covers_all_directions());
    CHECK(corner_symmetries(2).covers_all_directions());
    const auto g3 = corner_symmetries(3);
    CHECK_FALSE(g3.covers_all_directions());
    CHECK(std::count_if(g3.covering.begin(), g3.covering.end(), [](const DirectionCheck& d) { return !d.covered; }) == 20);
  }

  TEST_CASE("closed corner") {
    CHECK(in_closed_sbb({{1, 0}, {q(1, 2), 0}}));
    CHECK_FALSE(in_closed_sbb({{1, 0}, {q(3, 4), 0}}));
    CHECK(in_closed_sbb({{0, 0}, {0, 0}}));
    CHECK_FALSE(in_closed_sbb({{1, 0}, {-1, 0}}));
    CHECK_FALSE(in_closed_sbb({{0, 1}, {q(1, 2), q(1, 2)}}));  // 2 (1/2 + sqrt2/2) > sqrt2
    CHECK(in_closed_sbb({{0, 1}, {q(-1, 2), q(1, 2)}}));  // 2 (sqrt2 - 1) / 2 < sqrt2
  }

  TEST_CASE("signed permutation application") {
    const auto t = signed_permutation({1, 0}, {1, -1});
    CHECK(sparse_forge::apply(t, vec({q(1), q(2)})) == vec({q(2), q(-1)}));
    CHECK(compose(t, transpose(t)) == identity_element(2));
    CHECK_THROWS_AS(signed_permutation({0, 0}, {1, 1}), Error);
  }
}

TEST_SUITE("corner membership") {
  TEST_CASE("halving corner") {
    const CornerSpec s = parse_corner("sbb", 2);
    CHECK(corner_membership(vec({1, q(1, 4)}), s) == Membership::in);
    CHECK(corner_membership(vec({1, q(1, 2)}), s) == Membership::out);
    CHECK(corner_membership(vec({1, 0}), s) == Membership::out);
    CHECK(corner_membership(vec({q(1, 2)}), parse_corner("sbb", 1)) == Membership::in);
  }

  TEST_CASE("polynomial corner") {
    const CornerSpec s = parse_corner("poly:2", 2);
    CHECK(s.name() == "poly(2,2)");
    CHECK(corner_membership(vec({q(1, 2), q(1, 8)}), s) == Membership::in);
    CHECK(corner_membership(vec({q(1, 2), q(1, 4)}), s) == Membership::out);
    CHECK(corner_membership(vec({q(-1, 2), q(-1, 8)}), s) == Membership::out);
    const CornerSpec s3 = parse_corner("poly:1", 3);
    CHECK(corner_membership(vec({q(1, 2), q(1, 3), q(1, 4)}), s3) == Membership::in);
    CHECK(corner_membership(vec({q(1, 2), q(1, 3), q(1, 3)}), s3) == Membership::out);
  }

  TEST_CASE("psi corner is certified") {
    const CornerSpec s = parse_corner("psi:1", 2);
    // psi(1/2) = e^-2 = 0.1353...
    CHECK(corner_membership(vec({q(1, 2), q(1, 10)}), s) == Membership::in);
    CHECK(corner_membership(vec({q(1, 2), q(1, 5)}), s) == Membership::out);
    CHECK(corner_membership(vec({q(1, 2), q(135, 1000)}), s) == Membership::in);
    CHECK(corner_membership(vec({q(1, 2), q(136, 1000)}), s) == Membership::out);
  }

  TEST_CASE("psi membership is stable under refinement") {
    const CornerSpec s = parse_corner("psi:1", 2);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
      const auto v = vec({oracle::random_rational(rng, 0, 1, 997), oracle::random_rational(rng, 0, 1, 997)});
      const Membership coarse = corner_membership(v, s, 64), fine = corner_membership(v, s, 1024);
      if (coarse != Membership::unknown) CHECK(coarse == fine);
    }
  }

  TEST_CASE("link functions on tower values are structural") {
    const CornerSpec s = parse_corner("psi:1", 2);
    CHECK(link_holds(Scalar(TowerMag(3, 16)), Scalar(TowerMag(1, 16)), s, 64) == Membership::in);
    CHECK(link_holds(Scalar(TowerMag(2, 16)), Scalar(TowerMag(1, 16)), s, 64) == Membership::out);
  }

  TEST_CASE("parsing") {
    CHECK(parse_corner("psi:3", 2).l == 3);
    CHECK(to_string(Membership::unknown) == "UNKNOWN");
    CHECK_THROWS_AS(parse_corner("poly:0", 2), Error);
    CHECK_THROWS_AS(parse_corner("cube", 2), Error);
    CHECK_THROWS_AS(parse_corner("sbb", 0), Error);
  }
}

TEST_SUITE("sort reduction") {
  TEST_CASE("example") {
    const auto v = vec({q(-1, 4), q(1, 2), 0});
    const SortReduction r = sort_reduce(v);
    CHECK(r.m == 2);
    CHECK(r.w == vec({q(1, 2), q(1, 4)}));
    CHECK(sparse_forge::apply(r.element, v) == vec({q(1, 2), q(1, 4), 0}));
    CHECK(r.element.is_signed_permutation());
  }

  TEST_CASE("random vectors") {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 200; ++t) {
      std::vector<Scalar> v;
      std::set<Rational> mags;
      for (int i = 0; i < 4; ++i) {
        Rational x = oracle::random_rational(rng, -3, 3, 101);
        if (x != 0 && !mags.insert(abs(x)).second) x = 0;
        v.emplace_back(x);
      }
      const SortReduction r = sort_reduce(v);
      const auto image = sparse_forge::apply(r.element, v);
      for (int i = 0; i < r.m; ++i) CHECK(image[i] == r.w[i]);
      for (std::size_t i = r.m; i < image.size(); ++i) CHECK(scalar_eq(image[i], 0));
      for (int i = 0; i + 1 < r.m; ++i) CHECK(scalar_less(r.w[i + 1], r.w[i]));
      if (r.m > 0) CHECK(scalar_less(0, r.w.back()));
    }
  }

  TEST_CASE("ties are rejected") {
    try {
      sort_reduce(vec({q(1, 3), q(-1, 3)}));
      FAIL("expected TIE");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::tie);
    }
    CHECK(sort_reduce(vec({0, 0})).m == 0);
  }
}

TEST_SUITE("scale lemma") {
  TEST_CASE("difference form holds on the construction") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    for (int k = 1; k <= 4; ++k) {
      const auto r = scale_lemma_check(sys, 6, k);
      CHECK(r.passed());
      CHECK(r.verified > 0);
    }
  }

  TEST_CASE("point form holds") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    for (int k = 1; k <= 4; ++k) CHECK(scale_lemma_check(sys, 6, k, ScaleForm::points).passed());
  }

  TEST_CASE("literal band on differences has counterexamples") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    const auto r = scale_lemma_check(sys, 6, 3, ScaleForm::differences_literal_band);
    CHECK(r.violated > 0);
    REQUIRE_FALSE(r.witnesses.empty());
    // The witness d1 lies below the literal floor but inside the wider band.
    const Scalar d1 = r.witnesses.front().d[0];
    const Scalar r3 = sys.scale(3), r4 = sys.scale(4);
    CHECK(scalar_less(d1, r3 - r4));
    CHECK(scalar_leq(r3 - Rational(2) * r4, d1));
    CHECK(scalar_eq(r.witnesses.front().from[0].first - r.witnesses.front().from[0].second, d1));
  }

  TEST_CASE("middle thirds violates the difference form") {
    const auto sys = CantorSystem::middle_thirds(5);
    CHECK_FALSE(scale_lemma_check(sys, 5, 1).passed());
  }

  TEST_CASE("arguments") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 4);
    CHECK_THROWS_AS(scale_lemma_check(sys, 5, 1), Error);
    CHECK_THROWS_AS(scale_lemma_check(sys, 4, 4), Error);
    CHECK_THROWS_AS(parse_scale_form("band"), Error);
    CHECK(parse_scale_form("differences-literal-band") == ScaleForm::differences_literal_band);
  }
}

TEST_SUITE("containment") {
  TEST_CASE("automatic delta for the polynomial corner") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    const DeltaChoice d = choose_delta(sys, 6, parse_corner("poly:2", 2));
    CHECK(d.source == "auto");
    CHECK(d.index == 2);
    CHECK(d.delta == sys.scale(2));
    const DeltaChoice m = choose_delta(CantorSystem::middle_thirds(6), 6, parse_corner("poly:2", 2));
    CHECK(m.source == "fallback");
    CHECK(m.delta == Scalar(q(1, 3)));
  }

  TEST_CASE("exhaustive audit matches a brute-force pair count") {
    for (int K = 2; K <= 4; ++K) {
      const auto sys = CantorSystem::theorem_b(Regime::rational_fast, K);
      AuditOptions opt;
      opt.delta = Scalar(q(1, 16));
      const auto rep = containment_audit(sys, K, parse_corner("poly:2", 2), opt);
      const auto [good, bad] = oracle_poly_audit(sys, K, q(1, 16), 2);
      CHECK(rep.counts.verified == good);
      CHECK(rep.counts.violated == bad);
      CHECK(rep.counts.unknown == 0);
    }
    const auto mt = CantorSystem::middle_thirds(4);
    AuditOptions opt;
    opt.delta = Scalar(q(1, 3));
    const auto rep = containment_audit(mt, 4, parse_corner("poly:2", 2), opt);
    const auto [good, bad] = oracle_poly_audit(mt, 4, q(1, 3), 2);
    CHECK(rep.counts.verified == good);
    CHECK(rep.counts.violated == bad);
    CHECK(bad > 0);
  }

  TEST_CASE("construction passes with automatic delta, middle thirds fails") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    const auto rep = containment_audit(sys, 6, parse_corner("poly:2", 2));
    CHECK(rep.passed());
    CHECK(rep.counts.verified > 0);
    const auto mt = containment_audit(CantorSystem::middle_thirds(6), 6, parse_corner("poly:2", 2));
    CHECK_FALSE(mt.passed());
    REQUIRE_FALSE(mt.counts.witnesses.empty());
    const auto& w = mt.counts.witnesses.front();
    CHECK(corner_membership(w.d, parse_corner("poly:2", 2)) == Membership::out);
  }

  TEST_CASE("three dimensions") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 4);
    const auto rep = containment_audit(sys, 4, parse_corner("poly:2", 3));
    CHECK(rep.passed());
    CHECK(rep.counts.verified > 0);
  }

  TEST_CASE("tower regime psi corner") {
    const auto sys = CantorSystem::theorem_b(Regime::tower_fast, 5);
    const auto rep = containment_audit(sys, 5, parse_corner("psi:1", 2));
    CHECK(rep.passed());
    CHECK(rep.counts.unknown == 0);
  }

  TEST_CASE("sampled mode agrees in verdict") {
    AuditOptions opt;
    opt.mode = AuditMode::sampled;
    opt.max_pairs = 2000;
    opt.refine = 2;
    const auto good = containment_audit(CantorSystem::theorem_b(Regime::rational_fast, 6), 6, parse_corner("poly:2", 2), opt);
    CHECK(good.counts.violated == 0);
    const auto bad = containment_audit(CantorSystem::middle_thirds(6), 6, parse_corner("poly:2", 2), opt);
    CHECK(bad.counts.violated > 0);
  }

  TEST_CASE("merge is associative and commutative on counts") {
    AuditCounts a{1, 2, 3, {}}, b{10, 20, 30, {}}, c{100, 200, 300, {}};
    AuditCounts ab = a;
    ab.merge(b).merge(c);
    AuditCounts cb = c;
    cb.merge(b).merge(a);
    CHECK(ab.verified == cb.verified);
    CHECK(ab.violated == cb.violated);
    CHECK(ab.unknown == cb.unknown);
    CHECK(ab.verified == 111);
  }

  TEST_CASE("arguments") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 4);
    CHECK_THROWS_AS(containment_audit(sys, 4, parse_corner("poly:2", 4)), Error);
    CHECK_THROWS_AS(containment_audit(sys, 4, parse_corner("sbb", 2)), Error);
    AuditOptions opt;
    opt.delta = Scalar(0);
    CHECK_THROWS_AS(containment_audit(sys, 4, parse_corner("poly:2", 2), opt), Error);
  }
}
