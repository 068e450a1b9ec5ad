#pragma once

#include "sparse_forge/difference_table.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sparse_forge {

// ---------------------------------------------------------------------------
// Q(sqrt 2)

/// a + b sqrt(2), exact.
struct QSqrt2 {
  Rational a = 0;
  Rational b = 0;

  friend bool operator==(const QSqrt2&, const QSqrt2&) = default;
};

QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y);
QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y);
QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y);
int sign(const QSqrt2& x);
std::string to_string(const QSqrt2& x);

// ---------------------------------------------------------------------------
// Symmetry groups

/// Orthogonal map x -> M x with entries in Q(sqrt 2).
struct SymmetryElement {
  int n = 0;
  std::vector<QSqrt2> m;  // row-major n x n

  const QSqrt2& at(int i, int j) const { return m[static_cast<std::size_t>(i * n + j)]; }
  /// Signed permutation form: image coordinate i is sign[i] * x[perm[i]].
  bool is_signed_permutation() const;

  friend bool operator==(const SymmetryElement&, const SymmetryElement&) = default;
};

SymmetryElement identity_element(int n);
SymmetryElement signed_permutation(const std::vector<int>& perm, const std::vector<int>& signs);
SymmetryElement compose(const SymmetryElement& a, const SymmetryElement& b);  // a after b
SymmetryElement transpose(const SymmetryElement& a);                          // the inverse
QSqrt2 determinant(const SymmetryElement& a);
std::vector<QSqrt2> apply(const SymmetryElement& t, const std::vector<QSqrt2>& v);
/// Only for signed permutations.
std::vector<Scalar> apply(const SymmetryElement& t, const std::vector<Scalar>& v);

struct DirectionCheck {
  std::vector<int> direction;
  bool covered = false;
};

struct SymmetryGroup {
  int n = 0;
  std::string reading;  // "sign" (n=1), "octagon" (n=2), "signed-permutation" (n>=3)
  std::vector<SymmetryElement> elements;
  /// Whether each direction in {-1,0,1}^n \ 0 lies in some T(Cl(S_n)).
  std::vector<DirectionCheck> covering;
  bool covers_all_directions() const;
};

/// n = 1: {+-1}; n = 2: dihedral group of the regular octagon; n = 3, 4:
/// signed permutations. UNSUPPORTED_DIMENSION otherwise.
SymmetryGroup corner_symmetries(int n);

/// Whether x lies in the closure of S_n: 0 <= x_n and 2 x_{i+1} <= x_i.
bool in_closed_sbb(const std::vector<QSqrt2>& x);

// ---------------------------------------------------------------------------
// Corner cells

struct CornerSpec {
  enum class Kind { sbb, poly, psi } kind = Kind::sbb;
  int n = 2;
  int l = 1;

  std::string name() const;
};

/// "sbb", "poly:2", "psi:1"; n supplied separately.
CornerSpec parse_corner(std::string_view text, int n);

enum class Membership { in, out, unknown };

std::string_view to_string(Membership m) noexcept;

/// SBB: 0 < x_n and 2 x_{i+1} < x_i. POLY: all x_i > 0 and x_{i+1} < x_i^l.
/// PSI: 0 < x_n and x_{i+1} < psi_l(x_i). SBB and POLY are exact; PSI is
/// certified up to ceiling_bits.
Membership corner_membership(const std::vector<Scalar>& v, const CornerSpec& spec, long ceiling_bits = kDefaultCeilingBits);

/// Tri-state test of lower < g(upper) for the link function of `spec`.
Membership link_holds(const Scalar& lower, const Scalar& upper, const CornerSpec& spec, long ceiling_bits);

struct SortReduction {
  std::vector<Scalar> w;
  int m = 0;
  SymmetryElement element;
};

/// Signed permutation taking v to (w, 0, ..., 0) with w strictly decreasing
/// positive. Throws TIE when two nonzero |v_i| are equal.
SortReduction sort_reduce(const std::vector<Scalar>& v);

// ---------------------------------------------------------------------------
// Scale lemma and containment

enum class ScaleForm {
  /// Difference values against the band [r_k - 2 r_{k+1}, r_k].
  differences,
  /// Difference values against the band [r_k - r_{k+1}, r_k].
  differences_literal_band,
  /// Points of the level set against the band [r_k - r_{k+1}, r_k].
  points
};

std::string_view to_string(ScaleForm f) noexcept;
ScaleForm parse_scale_form(std::string_view text);

struct Witness {
  std::vector<Scalar> d;
  /// For each coordinate, the points (hi, lo) with d_i = hi - lo.
  std::vector<std::pair<Scalar, Scalar>> from;
};

struct ScaleLemmaReport {
  std::string system;
  int K = 0;
  int k = 0;
  ScaleForm form = ScaleForm::differences;
  std::size_t values = 0;  // distinct values enumerated
  std::uint64_t verified = 0;
  std::uint64_t violated = 0;
  std::vector<Witness> witnesses;
  bool passed() const { return violated == 0; }
};

/// Every pair (d1, d2) of enumerated values with d1 <= r_k and 0 < 2 d2 < d1
/// must lie in [0, r_{k+1}]^2 or band x [0, r_{k+1}]. Counts distinct pairs.
ScaleLemmaReport scale_lemma_check(const CantorSystem& sys, int K, int k, ScaleForm form = ScaleForm::differences,
                                   std::size_t max_witnesses = 4);

struct AuditCounts {
  std::uint64_t verified = 0;
  std::uint64_t violated = 0;
  std::uint64_t unknown = 0;
  std::vector<Witness> witnesses;

  /// Associative and commutative on counts; witnesses are concatenated.
  AuditCounts& merge(const AuditCounts& other);
};

enum class AuditMode { exhaustive, sampled };

struct AuditOptions {
  AuditMode mode = AuditMode::exhaustive;
  /// nullopt: automatic choice (see choose_delta).
  std::optional<Scalar> delta;
  std::uint64_t max_pairs = 100000;  // sampled mode
  int refine = 0;                    // sampled mode: extra levels for undecided boxes
  std::uint64_t seed = 1;
  long ceiling_bits = kDefaultCeilingBits;
  std::size_t max_witnesses = 4;
};

struct DeltaChoice {
  Scalar delta;
  int index = 1;
  std::string source;  // "auto", "fallback" or "explicit"
};

/// delta = r_N for the least N < K-1 such that r_{k+1} < g(g(r_k)) and
/// g(r_k) < r_k - r_{k+1} for all N < k <= K-1, g being the corner's link
/// function; r_1 ("fallback") when no such N exists.
DeltaChoice choose_delta(const CantorSystem& sys, int K, const CornerSpec& spec, long ceiling_bits = kDefaultCeilingBits);

struct AuditReport {
  std::string system;
  int K = 0;
  CornerSpec spec;
  AuditMode mode = AuditMode::exhaustive;
  DeltaChoice delta;
  std::size_t values = 0;
  AuditCounts counts;
  bool passed() const { return counts.violated == 0; }
};

/// Difference vectors d = x - y of level-K points with d in (0, delta)^n and
/// in S_n, checked against the corner. Exhaustive mode counts distinct
/// vectors of endpoint differences; sampled mode draws component pairs and
/// decides whole difference boxes.
AuditReport containment_audit(const CantorSystem& sys, int K, const CornerSpec& spec, const AuditOptions& opt = {});

void to_json(nlohmann::json& j, const Witness& w);
void to_json(nlohmann::json& j, const ScaleLemmaReport& r);
void to_json(nlohmann::json& j, const AuditReport& r);
void to_json(nlohmann::json& j, const SymmetryGroup& g);

}  // namespace sparse_forge
