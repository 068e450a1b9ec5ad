#include "doctest.h"
#include "oracles.hpp"

#include "sparse_forge/sparsity.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace sparse_forge;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

std::vector<std::pair<Rational, Rational>> parts_of(const IntervalSet& s) {
  std::vector<std::pair<Rational, Rational>> out;
  for (const auto& c : s.components()) out.emplace_back(*c.lo.to_rational(), *c.hi.to_rational());
  return out;
}

// Plain least-squares slope in double precision.
double oracle_slope(const std::vector<std::pair<double, double>>& xy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(xy.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<Scalar> powers(const Rational& base, int from, int to) {
  std::vector<Scalar> out;
  Rational r = 1;
  for (int i = 0; i < from; ++i) r *= base;
  for (int i = from; i <= to; ++i, r *= base) out.emplace_back(r);
  return out;
}

// Size of the square cover of A x A formed by products of brute-force
// optimal one-axis covers.
std::uint64_t product_cover(const std::vector<std::pair<Rational, Rational>>& axis, const Rational& r) {
  const std::uint64_t one = oracle::min_cover(axis, r);
  return one * one;
}

}  // namespace

TEST_SUITE("covering profiles") {
  TEST_CASE("unit interval halves") {
    const auto p = covering_profile(normalize({{0, 1}}), {1, q(1, 2), q(1, 4)});
    REQUIRE(p.entries.size() == 3);
    CHECK(p.entries[0].n == 1);
    CHECK(p.entries[1].n == 2);
    CHECK(p.entries[2].n == 4);
    for (const auto& e : p.entries) CHECK(e.method == CoverMethod::greedy_exact);
  }

  TEST_CASE("first scale of the construction needs two covers") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 4);
    const auto p = covering_profile(sys.level_set(4), {sys.scale(1)});
    CHECK(p.entries[0].n == 2);
  }

  TEST_CASE("middle thirds level 6 at its own scale") {
    const auto sys = CantorSystem::middle_thirds(6);
    const auto p = covering_profile(sys.level_set(6), {q(1, 729)});
    CHECK(p.entries[0].n == 64);
    CHECK(p.entries[0].n == oracle::min_cover(parts_of(sys.level_set(6)), q(1, 729)));
  }

  TEST_CASE("agrees with the brute-force oracle on middle thirds") {
    const auto sys = CantorSystem::middle_thirds(4);
    const auto parts = parts_of(sys.level_set(4));
    const auto radii = std::vector<Scalar>{q(1, 2), q(1, 5), q(1, 10), q(1, 27), q(1, 50), q(1, 81), q(1, 100)};
    const auto p = covering_profile(sys.level_set(4), radii);
    for (std::size_t i = 0; i < radii.size(); ++i) CHECK(p.entries[i].n == oracle::min_cover(parts, *radii[i].to_rational()));
  }

  TEST_CASE("radii must be positive and strictly decreasing") {
    const auto a = normalize({{0, 1}});
    CHECK_THROWS_AS(covering_profile(a, {q(1, 4), q(1, 2)}), Error);
    CHECK_THROWS_AS(covering_profile(a, {q(1, 2), q(1, 2)}), Error);
    CHECK_THROWS_AS(covering_profile(a, {q(1, 2), 0}), Error);
  }

  TEST_CASE("check_profile") {
    CoveringProfile ok{{{q(1, 2), 2}, {q(1, 4), 4}}};
    CHECK_NOTHROW(check_profile(ok));
    CoveringProfile bad{{{q(1, 2), 4}, {q(1, 4), 2}}};
    CHECK_THROWS_AS(check_profile(bad), Error);
  }

  TEST_CASE("window") {
    const auto p = covering_profile(normalize({{0, 1}}), powers(q(1, 2), 0, 5));
    const auto w = window(p, 1, 3);
    REQUIRE(w.entries.size() == 3);
    CHECK(w.entries[0].n == 2);
    CHECK_THROWS_AS(window(p, 3, 9), Error);
  }
}

TEST_SUITE("closed form") {
  TEST_CASE("matches greedy for every k < K <= 10") {
    for (int K = 1; K <= 10; ++K) {
      const auto sys = CantorSystem::theorem_b(Regime::rational_fast, K);
      std::vector<int> ks;
      for (int k = 0; k < K; ++k) ks.push_back(k);
      const auto p = theorem_b_profile(sys, K, ks, true);
      REQUIRE(p.entries.size() == ks.size());
      for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(p.entries[i].method == CoverMethod::closed_form);
        CHECK(p.entries[i].n == (std::uint64_t{2} << ks[i]));
      }
    }
  }

  TEST_CASE("interior radii of the band agree with the closed form") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 5);
    for (int k = 0; k < 4; ++k) {
      // r between r_{k+1} and r_k: the midpoint of the band.
      const Scalar r = (sys.scale(k) + sys.scale(k + 1)) / 2;
      const auto p = covering_profile(sys.level_set(5), {r});
      CHECK(p.entries[0].n == (std::uint64_t{2} << k));
    }
  }

  TEST_CASE("product bound on small instances") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 2);
    const auto parts = parts_of(sys.level_set(2));
    for (const Rational& r : {q(1, 3), q(1, 16), q(1, 100), q(1, 4096)}) {
      const auto n = covering_profile(sys.level_set(2), {r}).entries[0].n;
      CHECK(product_cover(parts, r) <= n * n);
    }
  }
}

TEST_SUITE("box dimension") {
  TEST_CASE("middle thirds slope") {
    const auto sys = CantorSystem::middle_thirds(12);
    const auto p = covering_profile(sys.level_set(12), powers(q(1, 3), 4, 12));
    const auto d = box_dim_estimate(p);
    CHECK(std::abs(d.slope.get_d() - std::log(2.0) / std::log(3.0)) < 0.02);
    std::vector<std::pair<double, double>> xy;
    for (const auto& e : p.entries) xy.emplace_back(-std::log(e.r.to_rational()->get_d()), std::log(static_cast<double>(e.n)));
    CHECK(std::abs(d.slope.get_d() - oracle_slope(xy)) < 1e-9);
    CHECK(d.points == 9);
  }

  TEST_CASE("unit interval has slope one") {
    const auto p = covering_profile(normalize({{0, 1}}), powers(q(1, 2), 1, 12));
    CHECK(std::abs(box_dim_estimate(p).slope.get_d() - 1.0) < 0.01);
  }

  TEST_CASE("finite set has slope zero") {
    std::vector<Interval> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({q(i, 5), q(i, 5)});
    const auto p = covering_profile(normalize(pts), powers(q(1, 10), 1, 5));
    for (const auto& e : p.entries) CHECK(e.n == 5);
    CHECK(abs(box_dim_estimate(p).slope) <= q(1, 100));
  }

  TEST_CASE("too few entries or one radius") {
    const auto p = covering_profile(normalize({{0, 1}}), {q(1, 2), q(1, 4)});
    CHECK_THROWS_AS(box_dim_estimate(p), Error);
    CoveringProfile same{{{q(1, 2), 2}, {q(1, 2), 2}, {q(1, 2), 2}}};
    try {
      box_dim_estimate(same);
      FAIL("expected DEGENERATE");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate);
    }
  }

  TEST_CASE("construction slope shrinks as the window deepens") {
    const auto sys = CantorSystem::theorem_b(Regime::rational_fast, 6);
    const auto full = theorem_b_profile(sys, 6, {0, 1, 2, 3, 4, 5}, false);
    const auto shallow = box_dim_estimate(window(full, 0, 2)).slope;
    const auto deep = box_dim_estimate(window(full, 3, 5)).slope;
    CHECK(deep < shallow);
    CHECK(deep < q(1, 100));
  }
}

TEST_SUITE("null diagnostic") {
  TEST_CASE("tower regime m = 1 certifies k = 3..10") {
    const auto sys = CantorSystem::theorem_b(Regime::tower_fast, 12);
    const auto r = null_diagnostic(sys, 1, 3, 10);
    CHECK(r.passed());
    CHECK(r.entries.size() == 8);
  }

  TEST_CASE("m = 0 in both regimes") {
    for (Regime reg : {Regime::rational_fast, Regime::tower_fast}) {
      const auto sys = CantorSystem::theorem_b(reg, 8);
      CHECK(null_diagnostic(sys, 0, 1, 6).passed());
    }
  }

  TEST_CASE("middle thirds fails for m = 1") {
    const auto sys = CantorSystem::middle_thirds(10);
    const auto r = null_diagnostic(sys, 1, 1, 8);
    REQUIRE(r.first_failure.has_value());
    CHECK(*r.first_failure <= 3);
  }

  TEST_CASE("argument checks") {
    const auto sys = CantorSystem::middle_thirds(4);
    CHECK_THROWS_AS(null_diagnostic(sys, -1, 1, 2), Error);
    CHECK_THROWS_AS(null_diagnostic(sys, 1, 0, 2), Error);
  }
}

TEST_SUITE("moduli") {
  TEST_CASE("square modulus substitutes radii") {
    CoveringProfile p{{{q(1, 4), 8}}};
    const auto b = modulus_pushforward(p, parse_modulus("pow:2"));
    REQUIRE(b.entries.size() == 1);
    CHECK(b.entries[0].r == Scalar(q(1, 16)));
    CHECK(b.entries[0].n == 8);
    CHECK(b.entries[0].method == CoverMethod::bound);
  }

  TEST_CASE("identity leaves radii unchanged") {
    const auto p = covering_profile(normalize({{0, 1}}), powers(q(1, 2), 0, 4));
    const auto b = modulus_pushforward(p, parse_modulus("identity"));
    for (std::size_t i = 0; i < p.entries.size(); ++i) {
      CHECK(b.entries[i].r == p.entries[i].r);
      CHECK(b.entries[i].n == p.entries[i].n);
    }
  }

  TEST_CASE("square modulus halves the slope") {
    const auto sys = CantorSystem::middle_thirds(10);
    const auto p = covering_profile(sys.level_set(10), powers(q(1, 3), 3, 10));
    const auto before = box_dim_estimate(p).slope;
    const auto after = box_dim_estimate(modulus_pushforward(p, parse_modulus("pow:2"))).slope;
    CHECK(abs(after * 2 - before) < q(1, 1000));
  }

  TEST_CASE("parsing") {
    CHECK(parse_modulus("scale:1/2").apply(q(1, 3)) == Scalar(q(1, 6)));
    CHECK(parse_modulus("pow:3").name() == "pow:3");
    CHECK_THROWS_AS(parse_modulus("pow:0"), Error);
    CHECK_THROWS_AS(parse_modulus("scale:-1"), Error);
    CHECK_THROWS_AS(parse_modulus("log"), Error);
  }
}

TEST_SUITE("export") {
  TEST_CASE("csv") {
    const auto p = covering_profile(normalize({{0, 1}}), {q(1, 2), q(1, 4)});
    CHECK(profile_csv(p) == "r,N,method\n1/2,2,GREEDY_EXACT\n1/4,4,GREEDY_EXACT\n");
    const std::string plot = profile_plot_csv(p);
    CHECK(plot.rfind("log_inv_r,log_N\n", 0) == 0);
  }

  TEST_CASE("json carries exact radii") {
    const auto p = covering_profile(normalize({{0, 1}}), {q(1, 3)});
    nlohmann::json j;
    to_json(j, p);
    CHECK(j.dump().find("1/3") != std::string::npos);
  }
}
