#pragma once

#include "sparse_forge/cantor.hpp"

#include <array>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace sparse_forge {

// ---------------------------------------------------------------------------
// Boundary transforms

/// Open gap (left, right) of a closed set.
struct GapDescriptor {
  Scalar left;
  Scalar right;
  Scalar midpoint;  // (left + right) / 2
  Scalar length;    // right - left > 0

  static GapDescriptor between(const Scalar& left, const Scalar& right);
};

enum class BoundaryKind { midpoints, left_endpoints, gap_lengths };

std::string_view to_string(BoundaryKind k) noexcept;
BoundaryKind parse_boundary_kind(std::string_view text);

/// Bounded gaps of `a`, left to right. NO_GAPS when `a` has < 2 components.
std::vector<GapDescriptor> gaps_of(const IntervalSet& a);

std::vector<Scalar> boundary_extract(const IntervalSet& a, BoundaryKind kind);

/// hull minus the union of the open gaps. OVERLAPPING_GAPS when two gaps
/// intersect; INVALID_ARGUMENT when a gap leaves the hull or is malformed.
IntervalSet reconstruct_from_gaps(const Interval& hull, std::vector<GapDescriptor> gaps);

// ---------------------------------------------------------------------------
// Factorial decoding

struct FactorialDecode {
  std::vector<Integer> chain;        // a_1 < a_2 < ...; a_{i+1} / a_i = q_1 + i - 1
  std::vector<Integer> nat_prefix;   // 0 followed by the successive ratios
};

/// Longest chain among the integers n >= 2 with 1/n in `lengths` whose
/// successive ratios are integers >= 2 increasing by one. Ties go to the
/// chain with the smallest first element. NO_CHAIN below two elements.
FactorialDecode decode_factorial(const std::vector<Scalar>& lengths);

/// Lengths 1/n! for 2 <= n <= n_max.
std::vector<Rational> factorial_lengths(int n_max);

// ---------------------------------------------------------------------------
// Packing map T(x) = sum 2^{i-1} x_i

using Tuple5 = std::array<Scalar, 5>;

Scalar t_pack_value(const Tuple5& x);

/// Packed value -> tuple, ordered by exact value comparison. Thread-safe.
class PackRegistry {
 public:
  /// Inserts; COLLISION when a different tuple already packs to an equal
  /// value. Re-inserting the same tuple is a no-op.
  void insert(const Scalar& packed, const Tuple5& x);
  /// NOT_FOUND when absent.
  Tuple5 lookup(const Scalar& packed) const;
  std::size_t size() const;

 private:
  struct Less {
    bool operator()(const Scalar& a, const Scalar& b) const { return scalar_less(a, b); }
  };
  mutable std::mutex mu_;
  std::map<Scalar, Tuple5, Less> map_;
};

Scalar t_pack(const Tuple5& x, PackRegistry& reg);
Tuple5 t_unpack(const Scalar& t, const PackRegistry& reg);

// ---------------------------------------------------------------------------
// Monotone codec g

/// sigma(x) = 1/2 + x / (2 (1 + |x|)), an order isomorphism R -> (0, 1).
Rational sigma(const Rational& x);
/// Inverse on (0, 1): u / (1 - |u|) with u = 2y - 1.
Rational sigma_inverse(const Rational& y);

/// First K binary digits of sigma(x), floor convention (dyadics end in 10...).
Address g_encode(const Rational& x, int K);
/// sigma^{-1} of the midpoint of the address cylinder.
Rational g_decode(const Address& addr);
/// |g_decode(g_encode(x, K)) - x| <= 2 * 2^-K * (1 + |x|)^2.
Rational g_error_bound(const Rational& x, int K);
/// The level-K component of `sys` named by g_encode(x, K).
Interval g_image(const CantorSystem& sys, const Rational& x, int K);

/// Distance to the nearest natural number: -x for x < 0.
Rational dis_nat(const Rational& x);

/// Addresses of g(x), g(y), g(x+y), g(xy), g(dis_nat(x)) at depth K.
std::array<Address, 5> x_tuple(const Rational& x, const Rational& y, int K);

// ---------------------------------------------------------------------------
// Finite K-demo: base set 1 + E_K inside [1, 2] and packed samples

struct KDemo {
  IntervalSet base;
  std::vector<Tuple5> samples;
  std::vector<Scalar> packed;
  /// Each packed sample lies within this distance of the image of the
  /// limit points its addresses name.
  Scalar tolerance;
};

/// Samples random address 5-tuples at level K, takes the right endpoints
/// of their components shifted by 1, and packs them through a fresh
/// registry (COLLISION propagates).
KDemo k_demo(const CantorSystem& sys, int K, std::size_t samples, std::uint64_t seed);

void to_json(nlohmann::json& j, const GapDescriptor& g);
void to_json(nlohmann::json& j, const FactorialDecode& d);
void to_json(nlohmann::json& j, const KDemo& d);

}  // namespace sparse_forge
