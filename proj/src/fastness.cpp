#include "sparse_forge/fastness.hpp"

namespace sparse_forge {

namespace {

constexpr std::size_t kRationalBits = 1u << 20;

Verdict verdict_of(std::optional<Ordering> o, bool strict) {
  if (!o) return Verdict::unknown;
  if (*o == Ordering::less) return Verdict::pass;
  if (*o == Ordering::equal) return strict ? Verdict::fail : Verdict::pass;
  return Verdict::fail;
}

std::optional<Ordering> safe_compare(const Scalar& a, const Scalar& b, long ceiling) {
  try {
    return scalar_compare(a, b, ceiling);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::incomparable) throw;
    return std::nullopt;
  }
}

// r_{k+1} against psi_j(r_k).
std::optional<Ordering> against_psi(const Scalar& next, const Scalar& cur, int j, long ceiling) {
  if (j == 0) return safe_compare(next, cur, ceiling);
  if (auto t = as_tower(cur); t && t->below_one()) return safe_compare(next, Scalar(psi_iter(*t, j)), ceiling);
  try {
    return refine_compare([&](long bits) { return std::pair{next.to_cert(bits), psi_iter(cur.to_cert(bits), j, bits)}; },
                          ceiling);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Scalar fast_sequence(Regime regime, int k) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "fast_sequence needs k >= 0");
  const auto basis = gap_basis(regime);
  const auto idx = static_cast<std::size_t>(k);
  if (regime == Regime::tower_fast) {
    if (auto t = basis->tower_element(idx)) return Scalar(*t);
  }
  if (auto q = basis->exact_element(idx, kRationalBits)) return Scalar(*q);
  return Scalar::basis(regime, idx);
}

FastnessReport fastness_check(Regime regime, int j, int k_max, long ceiling_bits) {
  if (j < 0) throw Error(ErrorCode::invalid_argument, "fastness_check needs j >= 0");
  if (k_max < 0) throw Error(ErrorCode::invalid_argument, "fastness_check needs k_max >= 0");
  FastnessReport rep;
  rep.regime = regime;
  rep.j = j;
  rep.k_max = k_max;
  rep.k0 = j;
  auto record = [&](int k, const char* cond, Verdict v) {
    FastnessEntry e{k, cond, v};
    if (v == Verdict::unknown) ++rep.unknown;
    if (v == Verdict::fail && !rep.first_failure) rep.first_failure = e;
    rep.entries.push_back(std::move(e));
  };
  for (int k = 0; k <= k_max; ++k) {
    const Scalar cur = fast_sequence(regime, k), next = fast_sequence(regime, k + 1);
    if (k >= rep.k0) record(k, "psi", verdict_of(against_psi(next, cur, j, ceiling_bits), false));
    if (k < k_max) {
      record(k, "domination", verdict_of(safe_compare(Rational(16) * next, cur, ceiling_bits), false));
      record(k, "halving", verdict_of(safe_compare(Rational(2) * next, cur, ceiling_bits), true));
    }
  }
  return rep;
}

void to_json(nlohmann::json& j, const FastnessReport& r) {
  auto entry = [](const FastnessEntry& e) {
    return nlohmann::json{{"k", e.k}, {"condition", e.condition}, {"verdict", std::string(to_string(e.verdict))}};
  };
  j = {{"regime", std::string(to_string(r.regime))}, {"j", r.j}, {"k_max", r.k_max}, {"k0", r.k0},
       {"unknown", r.unknown}, {"passed", r.passed()}};
  j["first_failure"] = r.first_failure ? entry(*r.first_failure) : nlohmann::json(nullptr);
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries) arr.push_back(entry(e));
}

}  // namespace sparse_forge
