#include "sparse_forge/cantor.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

namespace sparse_forge {

std::string_view to_string(GapRule r) noexcept {
  switch (r) {
    case GapRule::theorem_b: return "THEOREM_B";
    case GapRule::middle_thirds: return "MIDDLE_THIRDS";
    case GapRule::gap_encoded: return "GAP_ENCODED";
  }
  return "?";
}

GapRule parse_gap_rule(std::string_view text) {
  std::string s;
  for (char c : text) s += c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "theorem_b") return GapRule::theorem_b;
  if (s == "middle_thirds") return GapRule::middle_thirds;
  if (s == "gap_encoded") return GapRule::gap_encoded;
  throw Error(ErrorCode::parse_error, "unknown gap rule: " + std::string(text));
}

struct CantorSystem::Cache {
  std::mutex mu;
  std::vector<std::unique_ptr<IntervalSet>> levels;
};

CantorSystem::CantorSystem(GapRule rule, Regime regime, int max_depth, std::vector<Rational> lengths)
    : rule_(rule), regime_(regime), max_depth_(max_depth), lengths_(std::move(lengths)), cache_(std::make_shared<Cache>()) {
  if (max_depth < 0) throw Error(ErrorCode::invalid_argument, "max depth must be >= 0");
}

CantorSystem CantorSystem::theorem_b(Regime regime, int max_depth) {
  if (max_depth > kMaxCantorDepth)
    throw Error(ErrorCode::depth_exceeded, "theorem-b depth limited to " + std::to_string(kMaxCantorDepth));
  return CantorSystem(GapRule::theorem_b, regime, max_depth, {});
}

CantorSystem CantorSystem::middle_thirds(int max_depth) {
  return CantorSystem(GapRule::middle_thirds, Regime::rational_fast, max_depth, {});
}

CantorSystem CantorSystem::gap_encoded(std::vector<Rational> lengths, int max_depth) {
  gap_encoded_set(lengths, 0);  // validates
  return CantorSystem(GapRule::gap_encoded, Regime::rational_fast, max_depth, std::move(lengths));
}

std::string CantorSystem::name() const {
  std::string n(to_string(rule_));
  if (rule_ == GapRule::theorem_b) n += "/" + std::string(to_string(regime_));
  return n;
}

Scalar CantorSystem::scale(int k) const {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "scale index must be >= 0");
  switch (rule_) {
    case GapRule::theorem_b: return Scalar::basis(regime_, static_cast<std::size_t>(k));
    case GapRule::middle_thirds: {
      Integer p;
      mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(k));
      return Scalar(Rational(Integer(1), p));
    }
    case GapRule::gap_encoded: break;
  }
  throw Error(ErrorCode::invalid_argument, "gap-encoded systems have no uniform scale");
}

const IntervalSet& CantorSystem::level_set(int k) const {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "level must be >= 0");
  if (k > max_depth_)
    throw Error(ErrorCode::depth_exceeded, "level " + std::to_string(k) + " above max depth " + std::to_string(max_depth_));
  std::lock_guard lock(cache_->mu);
  auto& lv = cache_->levels;
  if (rule_ == GapRule::gap_encoded) {
    if (lv.size() <= static_cast<std::size_t>(k)) lv.resize(k + 1);
    if (!lv[k]) lv[k] = std::make_unique<IntervalSet>(gap_encoded_set(lengths_, k));
    return *lv[k];
  }
  if (lv.empty()) lv.push_back(std::make_unique<IntervalSet>(IntervalSet::from_normalized({{Scalar(0), Scalar(1)}})));
  while (lv.size() <= static_cast<std::size_t>(k)) {
    const int j = static_cast<int>(lv.size()) - 1;
    const IntervalSet& prev = *lv.back();
    const Scalar rj = scale(j);
    const Scalar rj1 = scale(j + 1);
    const Scalar far = rj - rj1;
    std::vector<Interval> gaps;
    gaps.reserve(prev.size());
    for (const auto& c : prev.components()) gaps.push_back({c.lo + rj1, c.lo + far});
    lv.push_back(std::make_unique<IntervalSet>(remove_open(prev, IntervalSet::from_normalized(std::move(gaps)))));
  }
  return *lv[k];
}

Interval address_interval(const CantorSystem& sys, const Address& addr) {
  if (sys.rule() == GapRule::gap_encoded) throw Error(ErrorCode::invalid_argument, "gap-encoded systems are not addressable");
  const int len = static_cast<int>(addr.size());
  if (len > sys.max_depth())
    throw Error(ErrorCode::depth_exceeded, "address length " + std::to_string(len) + " above max depth " + std::to_string(sys.max_depth()));
  Scalar lo = 0;
  for (int i = 1; i <= len; ++i) {
    const char b = addr[i - 1];
    if (b != '0' && b != '1') throw Error(ErrorCode::invalid_argument, "address digits must be 0 or 1");
    if (b == '1') lo = lo + (sys.scale(i - 1) - sys.scale(i));
  }
  return {lo, lo + sys.scale(len)};
}

std::vector<Scalar> level_endpoints(const CantorSystem& sys, int k) {
  std::vector<Scalar> out;
  for (const auto& c : sys.level_set(k).components()) {
    out.push_back(c.lo);
    if (!(c.hi == c.lo)) out.push_back(c.hi);
  }
  return out;
}

std::vector<Interval> scaled_middle_thirds(const Rational& lo, const Rational& len, int depth) {
  std::vector<std::pair<Rational, Rational>> cur{{lo, lo + len}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::pair<Rational, Rational>> next;
    next.reserve(cur.size() * 2);
    for (const auto& [a, b] : cur) {
      const Rational third = (b - a) / 3;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    cur = std::move(next);
  }
  std::vector<Interval> out;
  out.reserve(cur.size());
  for (auto& [a, b] : cur) out.push_back({Scalar(a), Scalar(b)});
  return out;
}

IntervalSet gap_encoded_set(const std::vector<Rational>& lengths, int depth) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "depth must be >= 0");
  Rational total = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] <= 0) throw Error(ErrorCode::invalid_argument, "gap lengths must be positive");
    if (i > 0 && !(lengths[i] < lengths[i - 1])) throw Error(ErrorCode::invalid_argument, "gap lengths must strictly decrease");
    total += lengths[i];
  }
  if (total >= 1) throw Error(ErrorCode::lengths_not_summable, "gap lengths sum to " + to_pq(total) + " >= 1");
  if (lengths.empty()) return normalize(scaled_middle_thirds(0, 1, depth));

  const Rational part = (1 - total) / static_cast<long>(lengths.size() + 1);
  // Each middle-thirds block of length part/m has largest gap part/(3m) < min length.
  const Rational ratio = part / (3 * lengths.back());
  Integer m_floor;
  mpz_fdiv_q(m_floor.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  const long m = m_floor.get_si() + 1;
  const Rational block = part / m;

  std::vector<Interval> out;
  Rational x = 0;
  for (std::size_t i = 0; i <= lengths.size(); ++i) {
    for (long b = 0; b < m; ++b) {
      auto blk = scaled_middle_thirds(x, block, depth);
      out.insert(out.end(), std::make_move_iterator(blk.begin()), std::make_move_iterator(blk.end()));
      x += block;
    }
    if (i < lengths.size()) x += lengths[i];
  }
  return normalize(std::move(out));
}

}  // namespace sparse_forge
