#include "densplit/omega_set.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "densplit/config.hpp"
#include "densplit/errors.hpp"
#include "set_nodes.hpp"

namespace densplit {

namespace detail {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kMaxPeriod = std::uint64_t{1} << 20;
constexpr std::uint64_t kMaxPrefix = std::uint64_t{1} << 24;

std::vector<std::uint64_t> cumulative(const std::vector<bool>& bits) {
  std::vector<std::uint64_t> cum(bits.size() + 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) cum[i + 1] = cum[i] + (bits[i] ? 1 : 0);
  return cum;
}

std::string bit_string(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

unsigned bit_length(const BigNat& k) {
  return sgn(k) == 0 ? 0 : static_cast<unsigned>(mpz_sizeinbase(k.get_mpz_t(), 2));
}

}  // namespace

// ---------------------------------------------------------------- periodic

PeriodicNode::PeriodicNode(std::vector<bool> prefix, std::vector<bool> pattern, std::string label)
    : SetNode(label.empty() ? render(prefix, pattern) : std::move(label)),
      prefix_(std::move(prefix)),
      pattern_(std::move(pattern)),
      prefix_cum_(cumulative(prefix_)),
      pattern_cum_(cumulative(pattern_)) {}

std::string PeriodicNode::render(const std::vector<bool>& prefix, const std::vector<bool>& pattern) {
  return "per(" + bit_string(prefix) + "," + bit_string(pattern) + ")";
}

bool PeriodicNode::contains(std::uint64_t k) const {
  return k < prefix_.size() ? prefix_[k] : pattern_[k % pattern_.size()];
}

bool PeriodicNode::contains_big(const BigNat& k) const {
  if (fits_u64(k)) return contains(to_u64(k));
  BigNat r = k % big(pattern_.size());
  return pattern_[to_u64(r)];
}

BigNat PeriodicNode::count_below(const BigNat& x) const {
  const BigNat len = big(prefix_.size());
  if (x <= len) return big(prefix_cum_[to_u64(x)]);
  const BigNat period = big(pattern_.size());
  const BigNat pop = big(pattern_cum_.back());
  auto pattern_count = [&](const BigNat& y) {
    BigNat q = y / period;
    BigNat r = y % period;
    return BigNat(q * pop + big(pattern_cum_[to_u64(r)]));
  };
  return big(prefix_cum_.back()) + pattern_count(x) - pattern_count(len);
}

std::optional<BigNat> PeriodicNode::count_leaf(const BigNat& lo, const BigNat& hi) const {
  if (lo >= hi) return BigNat(0);
  return BigNat(count_below(hi) - count_below(lo));
}

std::optional<BigNat> PeriodicNode::kth_leaf(const BigNat& k) const {
  const std::uint64_t in_prefix = prefix_cum_.back();
  if (k < big(in_prefix)) {
    auto it = std::upper_bound(prefix_cum_.begin(), prefix_cum_.end(), to_u64(k));
    return big(static_cast<std::uint64_t>(it - prefix_cum_.begin() - 1));
  }
  const std::uint64_t pop = pattern_cum_.back();
  if (pop == 0) throw PreconditionError("index beyond the size of a finite set: " + describe());
  const std::uint64_t period = pattern_.size();
  const std::uint64_t len = prefix_.size();
  const std::uint64_t skipped = (len / period) * pop + pattern_cum_[len % period];
  BigNat virt = k - big(in_prefix) + big(skipped);
  BigNat q = virt / big(pop);
  std::uint64_t r = to_u64(BigNat(virt % big(pop)));
  auto it = std::upper_bound(pattern_cum_.begin(), pattern_cum_.end(), r);
  std::uint64_t pos = static_cast<std::uint64_t>(it - pattern_cum_.begin() - 1);
  return BigNat(q * big(period) + big(pos));
}

void PeriodicNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  const std::uint64_t period = pattern_.size();
  std::uint64_t k = first_word * 64;
  std::uint64_t phase = k % period;
  for (auto& w : out) {
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < 64; ++i, ++k) {
      bool b = k < prefix_.size() ? prefix_[k] : pattern_[phase];
      bits |= static_cast<std::uint64_t>(b) << i;
      if (++phase == period) phase = 0;
    }
    w = bits;
  }
}

Tri PeriodicNode::finite() const { return pattern_cum_.back() == 0 ? Tri::yes : Tri::no; }

Tri PeriodicNode::cofinite() const {
  return pattern_cum_.back() == pattern_.size() ? Tri::yes : Tri::no;
}

bool PeriodicNode::is_everything() const {
  return prefix_cum_.back() == prefix_.size() && pattern_cum_.back() == pattern_.size();
}

bool PeriodicNode::is_nothing() const {
  return prefix_cum_.back() == 0 && pattern_cum_.back() == 0;
}

// --------------------------------------------------------------- bernoulli

namespace {

std::uint64_t threshold_for(const Rational& p) {
  BigNat scaled = p.get_num();
  mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 64);
  scaled /= p.get_den();
  return to_u64(scaled);
}

}  // namespace

BernoulliNode::BernoulliNode(const Rational& p, std::uint64_t seed)
    : SetNode("bern(" + to_string(p) + "," + std::to_string(seed) + ")"),
      p_(p),
      seed_(seed),
      key_(mix64(seed ^ 0x6a09e667f3bcc909ULL)),
      threshold_(threshold_for(p)) {}

bool BernoulliNode::contains(std::uint64_t k) const {
  std::uint64_t h = mix64(k * 0x9e3779b97f4a7c15ULL + key_);
  h = mix64(h ^ (key_ >> 7));
  return h < threshold_;
}

bool BernoulliNode::contains_big(const BigNat& k) const {
  if (fits_u64(k)) return contains(to_u64(k));
  std::uint64_t h = key_;
  const std::size_t limbs = mpz_size(k.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i) {
    h = mix64(h ^ mpz_getlimbn(k.get_mpz_t(), static_cast<mp_size_t>(i)));
  }
  return mix64(h ^ (key_ >> 7)) < threshold_;
}

std::optional<BigNat> BernoulliNode::kth_leaf(const BigNat& k) const {
  const std::uint64_t cap = explicit_cap();
  std::uint64_t seen = 0;
  for (std::uint64_t i = 0; i < cap; ++i) {
    if (!contains(i)) continue;
    if (big(seen) == k) return big(i);
    ++seen;
  }
  throw HorizonOverflow("element index of " + describe() + " lies beyond the explicit cap");
}

void BernoulliNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  std::uint64_t k = first_word * 64;
  for (auto& w : out) {
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < 64; ++i, ++k) bits |= static_cast<std::uint64_t>(contains(k)) << i;
    w = bits;
  }
}

// ------------------------------------------------------------------- range

RangeNode::RangeNode(BigNat lo, BigNat hi)
    : SetNode("range(" + lo.get_str() + "," + hi.get_str() + ")"), lo_(std::move(lo)), hi_(std::move(hi)) {}

bool RangeNode::contains(std::uint64_t k) const { return contains_big(big(k)); }

bool RangeNode::contains_big(const BigNat& k) const { return lo_ <= k && k < hi_; }

std::optional<BigNat> RangeNode::count_leaf(const BigNat& lo, const BigNat& hi) const {
  BigNat a = std::max(lo, lo_);
  BigNat b = std::min(hi, hi_);
  return a < b ? BigNat(b - a) : BigNat(0);
}

std::optional<BigNat> RangeNode::kth_leaf(const BigNat& k) const {
  BigNat e = lo_ + k;
  if (e >= hi_) throw PreconditionError("index beyond the size of a finite set: " + describe());
  return e;
}

void RangeNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  const BigNat window_lo = big(first_word) * 64;
  const BigNat window_hi = window_lo + big(out.size()) * 64;
  BigNat a = std::max(lo_, window_lo);
  BigNat b = std::min(hi_, window_hi);
  if (a >= b) return;
  const std::uint64_t base = first_word * 64;
  const std::uint64_t from = to_u64(a) - base;
  const std::uint64_t to = to_u64(b) - base;
  for (std::uint64_t w = from / 64; w * 64 < to; ++w) {
    std::uint64_t start = std::max(from, w * 64) - w * 64;
    std::uint64_t stop = std::min(to, w * 64 + 64) - w * 64;
    out[w] = low_mask(static_cast<unsigned>(stop)) & ~low_mask(static_cast<unsigned>(start));
  }
}

// ------------------------------------------------------------------ sparse

SparseNode::SparseNode(std::string label, std::function<BigNat(std::uint64_t)> element, bool canonical)
    : SetNode(std::move(label), canonical), generator_(std::move(element)) {}

namespace {

std::string list_label(const std::vector<BigNat>& elements) {
  std::string s = "list(";
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i) s += ",";
    s += elements[i].get_str();
  }
  return s + ")";
}

}  // namespace

SparseNode::SparseNode(std::vector<BigNat> elements)
    : SetNode(list_label(elements)), list_(std::move(elements)) {}

std::optional<BigNat> SparseNode::element(std::uint64_t j) const {
  if (list_) {
    if (j >= list_->size()) return std::nullopt;
    return (*list_)[j];
  }
  return generator_(j);
}

std::uint64_t SparseNode::rank(const BigNat& x) const {
  if (list_) {
    return static_cast<std::uint64_t>(std::lower_bound(list_->begin(), list_->end(), x) - list_->begin());
  }
  if (generator_(0) >= x) return 0;
  std::uint64_t below = 0;  // generator_(below) < x
  std::uint64_t above = 1;
  while (generator_(above) < x) {
    below = above;
    if (above > (std::uint64_t{1} << 62)) throw HorizonOverflow("enumeration too long: " + describe());
    above *= 2;
  }
  while (above - below > 1) {
    std::uint64_t mid = below + (above - below) / 2;
    if (generator_(mid) < x) below = mid; else above = mid;
  }
  return above;
}

bool SparseNode::contains_big(const BigNat& k) const {
  auto e = element(rank(k));
  return e && *e == k;
}

std::optional<BigNat> SparseNode::count_leaf(const BigNat& lo, const BigNat& hi) const {
  if (lo >= hi) return BigNat(0);
  return big(rank(hi) - rank(lo));
}

std::optional<BigNat> SparseNode::kth_leaf(const BigNat& k) const {
  if (!fits_u64(k)) throw PreconditionError("element index too large: " + describe());
  auto e = element(to_u64(k));
  if (!e) throw PreconditionError("index beyond the size of a finite set: " + describe());
  return e;
}

void SparseNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  const std::uint64_t base = first_word * 64;
  const BigNat hi = big(base) + big(out.size()) * 64;
  for (std::uint64_t j = rank(big(base));; ++j) {
    auto e = element(j);
    if (!e || *e >= hi) break;
    std::uint64_t off = to_u64(*e) - base;
    out[off / 64] |= std::uint64_t{1} << (off % 64);
  }
}

// ------------------------------------------------------------- every other

EveryOtherNode::EveryOtherNode(OmegaSet target)
    : SetNode("alt(" + target.describe() + ")", target.node().canonical()), target_(std::move(target)) {}

namespace {

BigNat count_or_throw(const OmegaSet& s, const BigNat& lo, const BigNat& hi) {
  auto c = try_count(s, lo, hi);
  if (!c) throw HorizonOverflow("cannot count " + s.describe() + " below " + hi.get_str());
  return *c;
}

BigNat half_up(const BigNat& c) { return BigNat((c + 1) / 2); }

}  // namespace

bool EveryOtherNode::contains(std::uint64_t k) const { return contains_big(big(k)); }

bool EveryOtherNode::contains_big(const BigNat& k) const {
  if (!target_.contains(k)) return false;
  BigNat before = count_or_throw(target_, BigNat(0), k);
  return mpz_even_p(before.get_mpz_t()) != 0;
}

std::optional<BigNat> EveryOtherNode::count_leaf(const BigNat& lo, const BigNat& hi) const {
  if (lo >= hi) return BigNat(0);
  auto below_hi = try_count(target_, BigNat(0), hi);
  auto below_lo = try_count(target_, BigNat(0), lo);
  if (!below_hi || !below_lo) return std::nullopt;
  return BigNat(half_up(*below_hi) - half_up(*below_lo));
}

std::optional<BigNat> EveryOtherNode::kth_leaf(const BigNat& k) const {
  return kth_element(target_, BigNat(2 * k));
}

void EveryOtherNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  target_.node().fill(first_word, out);
  BigNat before = count_or_throw(target_, BigNat(0), big(first_word) * 64);
  bool keep = mpz_even_p(before.get_mpz_t()) != 0;
  for (auto& w : out) {
    std::uint64_t kept = 0;
    for (std::uint64_t rest = w; rest != 0; rest &= rest - 1) {
      std::uint64_t lowest = rest & (~rest + 1);
      if (keep) kept |= lowest;
      keep = !keep;
    }
    w = kept;
  }
}

// ------------------------------------------------------------------ cached

CachedNode::CachedNode(OmegaSet inner, std::uint64_t horizon)
    : SetNode(inner.describe(), inner.node().canonical()), inner_(std::move(inner)), horizon_(horizon) {
  if (horizon_ > explicit_cap()) {
    throw HorizonOverflow("cannot cache " + describe() + " up to " + std::to_string(horizon_));
  }
  words_.assign((horizon_ + 63) / 64, 0);
  inner_.node().fill(0, words_);
  if (horizon_ % 64 && !words_.empty()) words_.back() &= low_mask(horizon_ % 64);
  cumulative_.assign(words_.size() + 1, 0);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + static_cast<std::uint64_t>(std::popcount(words_[i]));
  }
}

std::uint64_t CachedNode::count_cached(std::uint64_t lo, std::uint64_t hi) const {
  auto below = [&](std::uint64_t n) {
    std::uint64_t c = cumulative_[n / 64];
    if (n % 64) c += static_cast<std::uint64_t>(std::popcount(words_[n / 64] & low_mask(n % 64)));
    return c;
  };
  return below(hi) - below(lo);
}

bool CachedNode::contains(std::uint64_t k) const {
  if (k < horizon_) return (words_[k / 64] >> (k % 64)) & 1U;
  return inner_.contains(k);
}

bool CachedNode::contains_big(const BigNat& k) const {
  if (fits_u64(k)) return contains(to_u64(k));
  return inner_.contains(k);
}

std::optional<BigNat> CachedNode::count_leaf(const BigNat& lo, const BigNat& hi) const {
  if (lo >= hi) return BigNat(0);
  const BigNat h = big(horizon_);
  BigNat total = 0;
  if (lo < h) total += big(count_cached(to_u64(lo), to_u64(std::min(hi, h))));
  if (hi > h) {
    auto rest = try_count(inner_, std::max(lo, h), hi);
    if (!rest) return std::nullopt;
    total += *rest;
  }
  return total;
}

std::optional<BigNat> CachedNode::kth_leaf(const BigNat& k) const {
  if (k >= big(cumulative_.back())) return std::nullopt;
  const std::uint64_t kk = to_u64(k);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), kk);
  std::size_t w = static_cast<std::size_t>(it - cumulative_.begin() - 1);
  std::uint64_t word = words_[w];
  for (std::uint64_t skip = kk - cumulative_[w]; skip > 0; --skip) word &= word - 1;
  return big(w * 64 + static_cast<std::uint64_t>(std::countr_zero(word)));
}

void CachedNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  const std::uint64_t full_words = horizon_ / 64;
  std::size_t i = 0;
  for (; i < out.size() && first_word + i < full_words; ++i) out[i] = words_[first_word + i];
  if (i == out.size()) return;
  std::span<std::uint64_t> rest = out.subspan(i);
  inner_.node().fill(first_word + i, rest);
  if (first_word + i == full_words && horizon_ % 64) {
    std::uint64_t m = low_mask(horizon_ % 64);
    rest[0] = (rest[0] & ~m) | (words_[full_words] & m);
  }
}

// ------------------------------------------------------------- combination

namespace {

struct Flags {
  Tri fin;
  Tri cof;
};

Flags meet(Flags a, Flags b) {
  Flags r{Tri::unknown, Tri::unknown};
  if (a.fin == Tri::yes || b.fin == Tri::yes) {
    r.fin = Tri::yes;
  } else if ((a.cof == Tri::yes && b.fin == Tri::no) || (b.cof == Tri::yes && a.fin == Tri::no)) {
    r.fin = Tri::no;
  }
  if (a.cof == Tri::yes && b.cof == Tri::yes) {
    r.cof = Tri::yes;
  } else if (a.cof == Tri::no || b.cof == Tri::no) {
    r.cof = Tri::no;
  }
  return r;
}

Flags negate(Flags a) { return {a.cof, a.fin}; }

Flags flags_of(const OmegaSet& s) { return {s.finite(), s.cofinite()}; }

const char* op_name(SetOp op) {
  switch (op) {
    case SetOp::intersect: return "inter";
    case SetOp::unite: return "union";
    case SetOp::difference: return "diff";
    case SetOp::complement: return "compl";
  }
  return "?";
}

std::string combination_label(SetOp op, const OmegaSet& a, const std::optional<OmegaSet>& b) {
  std::string s = std::string(op_name(op)) + "(" + a.describe();
  if (b) s += "," + b->describe();
  return s + ")";
}

bool all_canonical(const OmegaSet& a, const std::optional<OmegaSet>& b) {
  return a.node().canonical() && (!b || b->node().canonical());
}

}  // namespace

CombinationNode::CombinationNode(SetOp op, OmegaSet a, std::optional<OmegaSet> b)
    : SetNode(combination_label(op, a, b), all_canonical(a, b)), op_(op), a_(std::move(a)), b_(std::move(b)) {
  Flags f{Tri::unknown, Tri::unknown};
  switch (op_) {
    case SetOp::intersect: f = meet(flags_of(a_), flags_of(*b_)); break;
    case SetOp::difference: f = meet(flags_of(a_), negate(flags_of(*b_))); break;
    case SetOp::unite: f = negate(meet(negate(flags_of(a_)), negate(flags_of(*b_)))); break;
    case SetOp::complement: f = negate(flags_of(a_)); break;
  }
  finite_ = f.fin;
  cofinite_ = f.cof;
}

bool CombinationNode::contains(std::uint64_t k) const {
  switch (op_) {
    case SetOp::intersect: return a_.contains(k) && b_->contains(k);
    case SetOp::unite: return a_.contains(k) || b_->contains(k);
    case SetOp::difference: return a_.contains(k) && !b_->contains(k);
    case SetOp::complement: return !a_.contains(k);
  }
  return false;
}

bool CombinationNode::contains_big(const BigNat& k) const {
  switch (op_) {
    case SetOp::intersect: return a_.contains(k) && b_->contains(k);
    case SetOp::unite: return a_.contains(k) || b_->contains(k);
    case SetOp::difference: return a_.contains(k) && !b_->contains(k);
    case SetOp::complement: return !a_.contains(k);
  }
  return false;
}

void CombinationNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  a_.node().fill(first_word, out);
  if (op_ == SetOp::complement) {
    for (auto& w : out) w = ~w;
    return;
  }
  std::vector<std::uint64_t> other(out.size());
  b_->node().fill(first_word, other);
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (op_) {
      case SetOp::intersect: out[i] &= other[i]; break;
      case SetOp::unite: out[i] |= other[i]; break;
      case SetOp::difference: out[i] &= ~other[i]; break;
      case SetOp::complement: break;
    }
  }
}

// ------------------------------------------------------------ dyadic bands

DyadicBandsNode::DyadicBandsNode(unsigned parity)
    : PiecewiseNode("osc(" + std::to_string(parity % 2) + ")"), parity_(parity % 2) {}

bool DyadicBandsNode::contains(std::uint64_t k) const {
  return k >= 1 && (static_cast<unsigned>(std::bit_width(k)) - 1) % 2 == parity_;
}

bool DyadicBandsNode::contains_big(const BigNat& k) const {
  return sgn(k) > 0 && (bit_length(k) - 1) % 2 == parity_;
}

std::vector<Piece> DyadicBandsNode::pieces(const BigNat& lo, const BigNat& hi) const {
  std::vector<Piece> out;
  if (lo >= hi) return out;
  BigNat cursor = lo;
  if (sgn(cursor) == 0) {
    out.push_back({BigNat(0), BigNat(1), empty_set(), BigNat(0)});
    cursor = 1;
  }
  while (cursor < hi) {
    unsigned band = bit_length(cursor) - 1;
    BigNat band_end = 1;
    mpz_mul_2exp(band_end.get_mpz_t(), band_end.get_mpz_t(), band + 1);
    BigNat end = std::min(band_end, hi);
    bool member = band % 2 == parity_;
    out.push_back({cursor, end, member ? omega() : empty_set(), member ? BigNat(end - cursor) : BigNat(0)});
    cursor = end;
  }
  return out;
}

}  // namespace detail

// ------------------------------------------------------------ node defaults

bool SetNode::contains_big(const BigNat& k) const {
  if (fits_u64(k)) return contains(to_u64(k));
  throw PreconditionError("membership beyond 2^64 is not available for " + describe());
}

std::optional<BigNat> SetNode::count_leaf(const BigNat&, const BigNat&) const { return std::nullopt; }

void SetNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  std::uint64_t k = first_word * 64;
  for (auto& w : out) {
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < 64; ++i, ++k) bits |= static_cast<std::uint64_t>(contains(k)) << i;
    w = bits;
  }
}

bool PiecewiseNode::contains(std::uint64_t k) const { return contains_big(big(k)); }

bool PiecewiseNode::contains_big(const BigNat& k) const {
  auto ps = pieces(k, BigNat(k + 1));
  return !ps.empty() && ps.front().pattern.contains(k);
}

void PiecewiseNode::fill(std::uint64_t first_word, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  const std::uint64_t lo = first_word * 64;
  const std::uint64_t hi = lo + out.size() * 64;
  for (const Piece& p : pieces(big(lo), big(hi))) {
    if (p.cardinality && sgn(*p.cardinality) == 0) continue;
    detail::or_into(p.pattern, first_word, out, to_u64(p.lo), to_u64(p.hi));
  }
}

// ----------------------------------------------------------------- handles

OmegaSet::OmegaSet(std::shared_ptr<const SetNode> node) : node_(std::move(node)) {
  if (!node_) throw PreconditionError("null set descriptor");
}

bool OmegaSet::contains(std::uint64_t k) const { return node_->contains(k); }
bool OmegaSet::contains(const BigNat& k) const { return node_->contains_big(k); }
Tri OmegaSet::finite() const { return node_->finite(); }
Tri OmegaSet::cofinite() const { return node_->cofinite(); }
const std::string& OmegaSet::describe() const { return node_->describe(); }

// --------------------------------------------------------------- factories

namespace {

using detail::PeriodicNode;

const PeriodicNode* as_periodic(const OmegaSet& s) {
  return s.node().kind() == NodeKind::periodic ? static_cast<const PeriodicNode*>(&s.node()) : nullptr;
}

const detail::CombinationNode* as_combination(const OmegaSet& s) {
  return s.node().kind() == NodeKind::combination ? static_cast<const detail::CombinationNode*>(&s.node())
                                                   : nullptr;
}

bool is_everything(const OmegaSet& s) {
  auto p = as_periodic(s);
  return p && p->is_everything();
}

bool is_nothing(const OmegaSet& s) {
  auto p = as_periodic(s);
  return p && p->is_nothing();
}

bool complement_of(const OmegaSet& a, const OmegaSet& b) {
  auto c = as_combination(b);
  return c && c->op() == SetOp::complement && same_set(c->left(), a);
}

bool apply(SetOp op, bool x, bool y) {
  switch (op) {
    case SetOp::intersect: return x && y;
    case SetOp::unite: return x || y;
    case SetOp::difference: return x && !y;
    case SetOp::complement: return !x;
  }
  return false;
}

std::optional<OmegaSet> collapse(SetOp op, const PeriodicNode& a, const PeriodicNode* b, const std::string& label) {
  const std::uint64_t pa = a.period();
  const std::uint64_t pb = b ? b->period() : 1;
  const std::uint64_t period = std::lcm(pa, pb);
  const std::uint64_t len = std::max(a.prefix_len(), b ? b->prefix_len() : 0);
  if (period > detail::kMaxPeriod || len > detail::kMaxPrefix) return std::nullopt;
  std::vector<bool> prefix(len);
  for (std::uint64_t k = 0; k < len; ++k) prefix[k] = apply(op, a.contains(k), b && b->contains(k));
  std::vector<bool> pattern(period);
  for (std::uint64_t r = 0; r < period; ++r) {
    pattern[r] = apply(op, a.pattern_bit(r % pa), b && b->pattern_bit(r % pb));
  }
  return OmegaSet(std::make_shared<PeriodicNode>(std::move(prefix), std::move(pattern), label));
}

}  // namespace

OmegaSet omega() {
  static const OmegaSet s(std::make_shared<PeriodicNode>(std::vector<bool>{}, std::vector<bool>{true}, "omega"));
  return s;
}

OmegaSet empty_set() {
  static const OmegaSet s(std::make_shared<PeriodicNode>(std::vector<bool>{}, std::vector<bool>{false}, "empty"));
  return s;
}

OmegaSet progression(std::uint64_t a, std::uint64_t d) {
  if (d == 0) throw PreconditionError("progression step must be positive");
  if (d > detail::kMaxPeriod || a > detail::kMaxPrefix) throw PreconditionError("progression parameters too large");
  std::vector<bool> prefix(a, false);
  std::vector<bool> pattern(d, false);
  pattern[a % d] = true;
  return OmegaSet(std::make_shared<PeriodicNode>(std::move(prefix), std::move(pattern),
                                                 "prog(" + std::to_string(a) + "," + std::to_string(d) + ")"));
}

OmegaSet periodic(const std::vector<bool>& prefix, const std::vector<bool>& pattern, std::string label) {
  if (pattern.empty()) throw PreconditionError("periodic pattern must be non-empty");
  if (pattern.size() > detail::kMaxPeriod || prefix.size() > detail::kMaxPrefix) {
    throw PreconditionError("periodic descriptor too large");
  }
  return OmegaSet(std::make_shared<PeriodicNode>(prefix, pattern, std::move(label)));
}

OmegaSet bernoulli(const Rational& p, std::uint64_t seed) {
  if (p <= 0 || p >= 1) throw PreconditionError("Bernoulli parameter must lie in (0,1), got " + to_string(p));
  return OmegaSet(std::make_shared<detail::BernoulliNode>(p, seed));
}

OmegaSet range_set(const BigNat& lo, const BigNat& hi) {
  if (sgn(lo) < 0) throw PreconditionError("range bounds must be natural numbers");
  if (lo >= hi) return empty_set();
  return OmegaSet(std::make_shared<detail::RangeNode>(lo, hi));
}

OmegaSet powers_of(std::uint64_t base) {
  if (base < 2) throw PreconditionError("power base must be at least 2");
  return OmegaSet(std::make_shared<detail::SparseNode>(
      "pow(" + std::to_string(base) + ")",
      [base](std::uint64_t j) {
        BigNat r;
        mpz_ui_pow_ui(r.get_mpz_t(), base, j);
        return r;
      },
      true));
}

OmegaSet tower() {
  return OmegaSet(std::make_shared<detail::SparseNode>(
      "tower",
      [](std::uint64_t j) {
        if (j > 40) throw HorizonOverflow("tower element too large");
        BigNat r = 1;
        mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), std::uint64_t{1} << j);
        return r;
      },
      true));
}

OmegaSet sequence(std::string label, std::function<BigNat(std::uint64_t)> element) {
  return OmegaSet(std::make_shared<detail::SparseNode>(std::move(label), std::move(element), false));
}

OmegaSet finite_set(std::vector<BigNat> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (!elements.empty() && sgn(elements.front()) < 0) throw PreconditionError("elements must be natural numbers");
  return OmegaSet(std::make_shared<detail::SparseNode>(std::move(elements)));
}

OmegaSet dyadic_bands(unsigned parity) { return OmegaSet(std::make_shared<detail::DyadicBandsNode>(parity)); }

OmegaSet every_other(const OmegaSet& target) {
  if (is_nothing(target)) return target;
  return OmegaSet(std::make_shared<detail::EveryOtherNode>(target));
}

OmegaSet cached(const OmegaSet& s, std::uint64_t horizon) {
  if (s.node().kind() == NodeKind::periodic) return s;
  return OmegaSet(std::make_shared<detail::CachedNode>(s, horizon));
}

OmegaSet combine(SetOp op, const OmegaSet& a, const std::optional<OmegaSet>& b) {
  if (op == SetOp::complement) {
    if (auto c = as_combination(a); c && c->op() == SetOp::complement) return c->left();
    if (is_everything(a)) return empty_set();
    if (is_nothing(a)) return omega();
    if (auto p = as_periodic(a)) {
      if (auto r = collapse(op, *p, nullptr, "compl(" + a.describe() + ")")) return *r;
    }
    return OmegaSet(std::make_shared<detail::CombinationNode>(op, a, std::nullopt));
  }
  if (!b) throw PreconditionError("binary set operation needs two operands");
  const OmegaSet& c = *b;
  if (same_set(a, c)) return op == SetOp::difference ? empty_set() : a;
  if (complement_of(a, c) || complement_of(c, a)) {
    switch (op) {
      case SetOp::intersect: return empty_set();
      case SetOp::unite: return omega();
      default: return a;
    }
  }
  switch (op) {
    case SetOp::intersect:
      if (is_everything(a) || is_nothing(c)) return c;
      if (is_everything(c) || is_nothing(a)) return a;
      break;
    case SetOp::unite:
      if (is_nothing(a) || is_everything(c)) return c;
      if (is_nothing(c) || is_everything(a)) return a;
      break;
    case SetOp::difference:
      if (is_nothing(a) || is_nothing(c)) return a;
      if (is_everything(c)) return empty_set();
      break;
    case SetOp::complement: break;
  }
  auto pa = as_periodic(a);
  auto pc = as_periodic(c);
  if (pa && pc) {
    if (auto r = collapse(op, *pa, pc, detail::combination_label(op, a, c))) return *r;
  }
  return OmegaSet(std::make_shared<detail::CombinationNode>(op, a, c));
}

OmegaSet intersect(const OmegaSet& a, const OmegaSet& b) { return combine(SetOp::intersect, a, b); }
OmegaSet unite(const OmegaSet& a, const OmegaSet& b) { return combine(SetOp::unite, a, b); }
OmegaSet difference(const OmegaSet& a, const OmegaSet& b) { return combine(SetOp::difference, a, b); }
OmegaSet complement(const OmegaSet& a) { return combine(SetOp::complement, a); }

bool same_set(const OmegaSet& a, const OmegaSet& b) {
  if (a.ptr() == b.ptr()) return true;
  return a.node().canonical() && b.node().canonical() && a.describe() == b.describe();
}

}  // namespace densplit
