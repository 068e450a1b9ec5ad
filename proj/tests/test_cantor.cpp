#include "doctest.h"
#include "oracles.hpp"

#include "sparse_forge/cantor.hpp"

#include <algorithm>

using namespace sparse_forge;

namespace {

using QI = std::pair<Rational, Rational>;

Rational q(long p, long d = 1) { return Rational(p, d); }

// Independent scales: r_0 = 1, r_1 = 1/16, r_{k+1} = r_k^{k+2}.
Rational oracle_scale(int k) {
  Rational r = 1;
  if (k >= 1) r = q(1, 16);
  for (int i = 1; i < k; ++i) {
    Rational p = 1;
    for (int j = 0; j < i + 2; ++j) p *= r;
    r = p;
  }
  return r;
}

std::vector<QI> oracle_level(int k) {
  std::vector<QI> cur{{0, 1}};
  for (int i = 0; i < k; ++i) {
    const Rational next = oracle_scale(i + 1);
    std::vector<QI> out;
    for (const auto& [a, b] : cur) {
      out.emplace_back(a, a + next);
      out.emplace_back(b - next, b);
    }
    cur = out;
  }
  return cur;
}

std::vector<QI> thirds_level(int k) {
  std::vector<QI> cur{{0, 1}};
  for (int i = 0; i < k; ++i) {
    std::vector<QI> out;
    for (const auto& [a, b] : cur) {
      const Rational w = (b - a) / 3;
      out.emplace_back(a, a + w);
      out.emplace_back(b - w, b);
    }
    cur = out;
  }
  return cur;
}

std::vector<QI> as_rationals(const IntervalSet& s) {
  std::vector<QI> out;
  for (const auto& c : s.components()) out.emplace_back(*c.lo.to_rational(), *c.hi.to_rational());
  return out;
}

bool contains(const IntervalSet& outer, const IntervalSet& inner) { return set_intersect(outer, inner) == inner; }

std::vector<Rational> gap_lengths(const IntervalSet& s) {
  std::vector<Rational> out;
  const auto& c = s.components();
  for (std::size_t i = 1; i < c.size(); ++i) out.push_back(*c[i].lo.to_rational() - *c[i - 1].hi.to_rational());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

TEST_SUITE("level sets") {
  TEST_CASE("first level of the rational construction") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 8);
    CHECK(as_rationals(sys.level_set(0)) == std::vector<QI>{{0, 1}});
    CHECK(as_rationals(sys.level_set(1)) == std::vector<QI>{{0, q(1, 16)}, {q(15, 16), 1}});
  }

  TEST_CASE("levels match the direct recursion") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 8);
    for (int k = 0; k <= 4; ++k) CHECK(as_rationals(sys.level_set(k)) == oracle_level(k));
  }

  TEST_CASE("middle thirds level 2") {
    const auto sys = CantorSystem::middle_thirds(6);
    CHECK(as_rationals(sys.level_set(2)) ==
          std::vector<QI>{{0, q(1, 9)}, {q(2, 9), q(1, 3)}, {q(2, 3), q(7, 9)}, {q(8, 9), 1}});
    for (int k = 0; k <= 6; ++k) CHECK(as_rationals(sys.level_set(k)) == thirds_level(k));
  }

  TEST_CASE("census: 2^k components of length exactly r_k") {
    for (Regime reg : {Regime::rational_fast, Regime::tower_fast}) {
      const auto sys = CantorSystem::theorem_b(reg, 12);
      for (int k = 0; k <= (reg == Regime::rational_fast ? 12 : 10); ++k) {
        const IntervalSet& e = sys.level_set(k);
        REQUIRE(e.size() == (std::size_t{1} << k));
        const Scalar rk = sys.scale(k);
        for (const auto& c : e.components()) CHECK(scalar_eq(c.hi - c.lo, rk));
      }
    }
  }

  TEST_CASE("levels are nested") {
    for (auto sys : {CantorSystem::theorem_b(Regime::rational_fast, 9), CantorSystem::theorem_b(Regime::tower_fast, 7),
                     CantorSystem::middle_thirds(9)})
      for (int k = 0; k < sys.max_depth(); ++k) CHECK(contains(sys.level_set(k), sys.level_set(k + 1)));
  }

  TEST_CASE("endpoints use coefficients in {-1, 0, 1}") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 8);
    for (int k = 0; k <= 8; ++k) {
      const auto ends = level_endpoints(sys, k);
      CHECK(ends.size() == (std::size_t{2} << k));
      for (const auto& e : ends) {
        const GapCombo c = as_combo(e, Regime::rational_fast);
        CHECK(c.den == 1);
        CHECK(c.coeffs.size() <= static_cast<std::size_t>(k + 1));
        for (auto x : c.coeffs) CHECK(std::abs(x) <= 1);
      }
      CHECK(std::is_sorted(ends.begin(), ends.end(), scalar_less));
    }
  }

  TEST_CASE("depth bounds") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 3);
    CHECK_THROWS_AS(sys.level_set(4), Error);
    CHECK_THROWS_AS(sys.level_set(-1), Error);
    CHECK_THROWS_AS(CantorSystem::theorem_b(Regime::rational_fast, kMaxCantorDepth + 1), Error);
  }

  TEST_CASE("copies share the cache") {
    const auto a = CantorSystem::middle_thirds(5);
    const auto b = a;
    CHECK(&a.level_set(4) == &b.level_set(4));
  }

  TEST_CASE("rule names") {
    CHECK(parse_gap_rule("theorem_b") == GapRule::theorem_b);
    CHECK(parse_gap_rule("middle-thirds") == GapRule::middle_thirds);
    CHECK(to_string(GapRule::gap_encoded) == "GAP_ENCODED");
    CHECK_THROWS_AS(parse_gap_rule("fat"), Error);
  }
}

TEST_SUITE("addresses") {
  TEST_CASE("examples") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    const Interval root = address_interval(sys, "");
    CHECK(root.lo == Scalar(0));
    CHECK(scalar_eq(root.hi, 1));
    const Interval left = address_interval(sys, "0");
    CHECK(scalar_eq(left.lo, 0));
    CHECK(scalar_eq(left.hi, sys.scale(1)));
    const Interval rr = address_interval(sys, "11");
    CHECK(scalar_eq(rr.lo, Scalar(1) - sys.scale(2)));
    CHECK(scalar_eq(rr.hi, 1));
  }

  TEST_CASE("nested in every prefix and ordered lexicographically") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    std::vector<Address> all;
    for (int n = 0; n < 64; ++n) {
      Address a;
      for (int b = 5; b >= 0; --b) a.push_back((n >> b) & 1 ? '1' : '0');
      all.push_back(a);
    }
    std::optional<Interval> prev;
    for (const auto& a : all) {
      const Interval iv = address_interval(sys, a);
      CHECK(std::find(sys.level_set(6).components().begin(), sys.level_set(6).components().end(), iv) !=
            sys.level_set(6).components().end());
      for (std::size_t p = 0; p < a.size(); ++p) {
        const Interval outer = address_interval(sys, a.substr(0, p));
        CHECK(scalar_leq(outer.lo, iv.lo));
        CHECK(scalar_leq(iv.hi, outer.hi));
      }
      if (prev) CHECK(scalar_less(prev->hi, iv.lo));
      prev = iv;
    }
  }

  TEST_CASE("errors") {
    const auto sys = CantorSystem::middle_thirds(3);
    CHECK_THROWS_AS(address_interval(sys, "0101"), Error);
    CHECK_THROWS_AS(address_interval(sys, "02"), Error);
    const auto enc = CantorSystem::gap_encoded({q(1, 2)}, 2);
    CHECK_THROWS_AS(address_interval(enc, "0"), Error);
  }
}

TEST_SUITE("gap-encoded sets") {
  TEST_CASE("two largest gaps are the encoded lengths") {
    const IntervalSet s = gap_encoded_set({q(1, 2), q(1, 6)}, 2);
    const auto g = gap_lengths(s);
    REQUIRE(g.size() >= 2);
    CHECK(g[0] == q(1, 2));
    CHECK(g[1] == q(1, 6));
    CHECK(std::all_of(g.begin() + 2, g.end(), [](const Rational& x) { return x < q(1, 6); }));
  }

  TEST_CASE("encoded gaps appear left to right") {
    const std::vector<Rational> lengths{q(1, 2), q(1, 6), q(1, 24)};
    const IntervalSet s = gap_encoded_set(lengths, 3);
    const auto& c = s.components();
    std::vector<Rational> seen;
    for (std::size_t i = 1; i < c.size(); ++i) {
      const Rational g = *c[i].lo.to_rational() - *c[i - 1].hi.to_rational();
      if (std::find(lengths.begin(), lengths.end(), g) != lengths.end()) seen.push_back(g);
    }
    CHECK(seen == lengths);
    CHECK(scalar_eq(c.front().lo, 0));
    CHECK(scalar_eq(c.back().hi, 1));
  }

  TEST_CASE("no lengths gives one middle-thirds block") {
    const IntervalSet s = gap_encoded_set({}, 1);
    CHECK(as_rationals(s) == thirds_level(1));
  }

  TEST_CASE("lengths must be summable and decreasing") {
    CHECK_THROWS_AS(gap_encoded_set({q(1, 2), q(1, 2)}, 2), Error);
    try {
      gap_encoded_set({q(2, 3), q(1, 3)}, 2);
      FAIL("expected LENGTHS_NOT_SUMMABLE");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::lengths_not_summable);
    }
  }

  TEST_CASE("system wrapper") {
    const auto sys = CantorSystem::gap_encoded({q(1, 2), q(1, 6)}, 3);
    CHECK(sys.level_set(2) == gap_encoded_set({q(1, 2), q(1, 6)}, 2));
    CHECK(contains(sys.level_set(1), sys.level_set(2)));
    CHECK_THROWS_AS(sys.scale(1), Error);
  }

  TEST_CASE("scaled middle thirds") {
    const auto parts = scaled_middle_thirds(q(1, 2), q(1, 4), 1);
    REQUIRE(parts.size() == 2);
    CHECK(scalar_eq(parts[0].hi, q(7, 12)));
    CHECK(scalar_eq(parts[1].lo, q(2, 3)));
  }
}
