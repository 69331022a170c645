// Exact counting over descriptor trees: symbolic where the leaves allow it,
// word-parallel scanning below the explicit cap otherwise.

#include <algorithm>
#include <bit>

#include "densplit/config.hpp"
#include "densplit/errors.hpp"
#include "densplit/omega_set.hpp"
#include "set_nodes.hpp"

namespace densplit {

namespace detail {

namespace {

constexpr std::size_t kScanChunkWords = std::size_t{1} << 14;
constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 22;

const CombinationNode* as_combination(const OmegaSet& s) {
  return s.node().kind() == NodeKind::combination ? static_cast<const CombinationNode*>(&s.node()) : nullptr;
}

bool scannable(const BigNat& hi) { return fits_u64(hi) && to_u64(hi) <= explicit_cap(); }

/// True when counting s symbolically would bottom out in a scan anyway.
bool prefers_scan(const OmegaSet& s, const BigNat& hi) {
  switch (s.node().kind()) {
    case NodeKind::bernoulli:
      return true;
    case NodeKind::every_other:
      return true;
    case NodeKind::cached: {
      auto& c = static_cast<const CachedNode&>(s.node());
      return hi <= big(c.horizon()) || prefers_scan(c.inner(), hi);
    }
    case NodeKind::combination: {
      auto& c = static_cast<const CombinationNode&>(s.node());
      if (prefers_scan(c.left(), hi)) return true;
      return c.op() != SetOp::complement && prefers_scan(c.right(), hi);
    }
    default:
      return false;
  }
}

BigNat scan(const std::vector<OmegaSet>& lits, std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) return BigNat(0);
  const std::uint64_t w_lo = lo / 64;
  const std::uint64_t w_hi = (hi + 63) / 64;
  std::vector<std::uint64_t> acc;
  std::vector<std::uint64_t> tmp;
  std::uint64_t total = 0;
  for (std::uint64_t w = w_lo; w < w_hi; w += kScanChunkWords) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kScanChunkWords, w_hi - w));
    acc.assign(n, ~std::uint64_t{0});
    tmp.resize(n);
    for (const auto& s : lits) {
      s.node().fill(w, tmp);
      for (std::size_t i = 0; i < n; ++i) acc[i] &= tmp[i];
    }
    if (w == w_lo && lo % 64) acc[0] &= ~low_mask(lo % 64);
    if (w + n == w_hi && hi % 64) acc[n - 1] &= low_mask(hi % 64);
    for (auto x : acc) total += static_cast<std::uint64_t>(std::popcount(x));
  }
  return big(total);
}

std::optional<BigNat> conj(std::vector<OmegaSet> lits, BigNat lo, BigNat hi);

std::optional<BigNat> single(const OmegaSet& s, const BigNat& lo, const BigNat& hi) {
  const SetNode& node = s.node();
  if (auto c = as_combination(s)) {
    switch (c->op()) {
      case SetOp::complement:
        if (auto r = conj({c->left()}, lo, hi)) return BigNat(hi - lo - *r);
        break;
      case SetOp::unite: {
        auto a = conj({c->left()}, lo, hi);
        auto b = a ? conj({c->right()}, lo, hi) : std::nullopt;
        auto ab = b ? conj({c->left(), c->right()}, lo, hi) : std::nullopt;
        if (ab) return BigNat(*a + *b - *ab);
        break;
      }
      default:
        return conj({s}, lo, hi);
    }
  } else if (node.kind() == NodeKind::piecewise) {
    auto& pw = static_cast<const PiecewiseNode&>(node);
    BigNat total = 0;
    for (const Piece& p : pw.pieces(lo, hi)) {
      if (p.cardinality) {
        total += *p.cardinality;
        continue;
      }
      auto r = conj({p.pattern}, p.lo, p.hi);
      if (!r) return std::nullopt;
      total += *r;
    }
    return total;
  } else if (auto r = node.count_leaf(lo, hi)) {
    return r;
  }
  if (scannable(hi)) return scan({s}, to_u64(lo), to_u64(hi));
  return std::nullopt;
}

std::optional<BigNat> conj(std::vector<OmegaSet> lits, BigNat lo, BigNat hi) {
  if (lo >= hi) return BigNat(0);
  std::vector<OmegaSet> out;
  while (!lits.empty()) {
    OmegaSet s = lits.back();
    lits.pop_back();
    const SetNode& node = s.node();
    if (auto c = as_combination(s)) {
      if (c->op() == SetOp::intersect) {
        lits.push_back(c->left());
        lits.push_back(c->right());
        continue;
      }
      if (c->op() == SetOp::difference) {
        lits.push_back(c->left());
        lits.push_back(complement(c->right()));
        continue;
      }
    }
    if (node.kind() == NodeKind::cached) {
      auto& cn = static_cast<const CachedNode&>(node);
      if (hi > big(cn.horizon())) {
        lits.push_back(cn.inner());
        continue;
      }
    }
    if (node.kind() == NodeKind::periodic) {
      auto& p = static_cast<const PeriodicNode&>(node);
      if (p.is_everything()) continue;
      if (p.is_nothing()) return BigNat(0);
    }
    if (node.kind() == NodeKind::range) {
      auto& r = static_cast<const RangeNode&>(node);
      lo = std::max(lo, r.lo());
      hi = std::min(hi, r.hi());
      if (lo >= hi) return BigNat(0);
      continue;
    }
    bool duplicate = false;
    for (const auto& t : out) {
      if (same_set(s, t)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      auto c = as_combination(out[j]);
      if (i != j && c && c->op() == SetOp::complement && same_set(c->left(), out[i])) return BigNat(0);
    }
  }
  if (out.empty()) return BigNat(hi - lo);
  if (out.size() == 1) return single(out[0], lo, hi);

  const bool scan_ok = scannable(hi);
  if (scan_ok) {
    for (const auto& s : out) {
      if (prefers_scan(s, hi)) return scan(out, to_u64(lo), to_u64(hi));
    }
  }

  // Merge eventually periodic literals into one.
  {
    std::vector<OmegaSet> merged;
    std::optional<OmegaSet> periodic_part;
    for (const auto& s : out) {
      if (s.node().kind() != NodeKind::periodic) {
        merged.push_back(s);
      } else if (!periodic_part) {
        periodic_part = s;
      } else {
        OmegaSet m = intersect(*periodic_part, s);
        if (m.node().kind() == NodeKind::periodic) {
          periodic_part = m;
        } else {
          merged.push_back(s);
        }
      }
    }
    if (periodic_part) merged.push_back(*periodic_part);
    if (merged.size() < out.size()) return conj(merged, lo, hi);
  }

  // A sparse literal: test its few elements against the rest.
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].node().kind() != NodeKind::sparse) continue;
    auto& sp = static_cast<const SparseNode&>(out[i].node());
    const std::uint64_t first = sp.rank(lo);
    const std::uint64_t last = sp.rank(hi);
    if (last - first > kMaxEnumeration) break;
    std::uint64_t hits = 0;
    for (std::uint64_t j = first; j < last; ++j) {
      BigNat e = *sp.element(j);
      bool all = true;
      for (std::size_t t = 0; t < out.size() && all; ++t) {
        if (t != i) all = out[t].contains(e);
      }
      hits += all ? 1 : 0;
    }
    return big(hits);
  }

  // A piecewise literal: split the range along its pieces.
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].node().kind() != NodeKind::piecewise) continue;
    auto& pw = static_cast<const PiecewiseNode&>(out[i].node());
    std::vector<OmegaSet> rest;
    for (std::size_t t = 0; t < out.size(); ++t) {
      if (t != i) rest.push_back(out[t]);
    }
    BigNat total = 0;
    for (const Piece& p : pw.pieces(lo, hi)) {
      if (p.cardinality && sgn(*p.cardinality) == 0) continue;
      std::vector<OmegaSet> sub = rest;
      sub.push_back(p.pattern);
      auto r = conj(sub, p.lo, p.hi);
      if (!r) return std::nullopt;
      total += *r;
    }
    return total;
  }

  // Complements and unions by inclusion-exclusion.
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = as_combination(out[i]);
    if (!c || (c->op() != SetOp::complement && c->op() != SetOp::unite)) continue;
    std::vector<OmegaSet> rest;
    for (std::size_t t = 0; t < out.size(); ++t) {
      if (t != i) rest.push_back(out[t]);
    }
    auto with = [&](std::initializer_list<OmegaSet> extra) {
      std::vector<OmegaSet> v = rest;
      v.insert(v.end(), extra.begin(), extra.end());
      return conj(v, lo, hi);
    };
    if (c->op() == SetOp::complement) {
      auto all = conj(rest, lo, hi);
      auto inside = all ? with({c->left()}) : std::nullopt;
      if (inside) return BigNat(*all - *inside);
    } else {
      auto a = with({c->left()});
      auto b = a ? with({c->right()}) : std::nullopt;
      auto ab = b ? with({c->left(), c->right()}) : std::nullopt;
      if (ab) return BigNat(*a + *b - *ab);
    }
    break;
  }

  if (scan_ok) return scan(out, to_u64(lo), to_u64(hi));
  return std::nullopt;
}

}  // namespace

std::optional<BigNat> try_count(const OmegaSet& s, const BigNat& lo, const BigNat& hi) {
  if (lo >= hi) return BigNat(0);
  return conj({s}, lo, hi);
}

void or_into(const OmegaSet& s, std::uint64_t first_word, std::span<std::uint64_t> out, std::uint64_t lo,
             std::uint64_t hi) {
  if (lo >= hi) return;
  const std::uint64_t w_lo = lo / 64;
  const std::uint64_t w_hi = (hi + 63) / 64;
  std::vector<std::uint64_t> tmp(w_hi - w_lo);
  s.node().fill(w_lo, tmp);
  if (lo % 64) tmp.front() &= ~low_mask(lo % 64);
  if (hi % 64) tmp.back() &= low_mask(hi % 64);
  for (std::size_t i = 0; i < tmp.size(); ++i) out[w_lo - first_word + i] |= tmp[i];
}

}  // namespace detail

std::uint64_t Prefix::count() const {
  std::uint64_t c = 0;
  for (auto w : words) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

std::vector<std::uint64_t> Prefix::members() const {
  std::vector<std::uint64_t> m;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::uint64_t w = words[i]; w != 0; w &= w - 1) {
      m.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
    }
  }
  return m;
}

Prefix materialize_prefix(const OmegaSet& s, std::uint64_t n) {
  if (n > explicit_cap()) {
    throw HorizonOverflow("refusing to materialize " + std::to_string(n) + " bits of " + s.describe() +
                          " (cap " + std::to_string(explicit_cap()) + ")");
  }
  Prefix p;
  p.horizon = n;
  p.words.assign((n + 63) / 64, 0);
  s.node().fill(0, p.words);
  if (n % 64) p.words.back() &= detail::low_mask(n % 64);
  return p;
}

BigNat count_range(const OmegaSet& s, const BigNat& lo, const BigNat& hi) {
  auto c = detail::try_count(s, lo, hi);
  if (!c) {
    throw HorizonOverflow("no exact count for " + s.describe() + " on [" + lo.get_str() + ", " + hi.get_str() +
                          ") without materializing beyond the cap");
  }
  return *c;
}

BigNat count_below(const OmegaSet& s, const BigNat& n) { return count_range(s, BigNat(0), n); }

BigNat kth_element(const OmegaSet& s, const BigNat& k) {
  if (sgn(k) < 0) throw PreconditionError("element index must be natural");
  if (auto e = s.node().kth_leaf(k)) return *e;
  BigNat hi = std::max(BigNat(k + 1), BigNat(64));
  BigNat lo = 0;  // count_below(lo) <= k
  const BigNat limit = BigNat(1) << 4096;
  while (count_below(s, hi) <= k) {
    lo = hi;
    if (hi > limit || (s.finite() == Tri::yes && !fits_u64(hi))) {
      throw PreconditionError("index beyond the size of the set " + s.describe());
    }
    hi *= 2;
  }
  // Least x with count_below(x + 1) > k lies in [lo, hi).
  while (hi - lo > 1) {
    BigNat mid = (lo + hi) / 2;
    if (count_below(s, mid) <= k) lo = mid; else hi = mid;
  }
  return lo;
}

PrefixCounter::PrefixCounter(const OmegaSet& s, std::uint64_t horizon) : prefix_(materialize_prefix(s, horizon)) {
  cumulative_.assign(prefix_.words.size() + 1, 0);
  for (std::size_t i = 0; i < prefix_.words.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + static_cast<std::uint64_t>(std::popcount(prefix_.words[i]));
  }
}

std::uint64_t PrefixCounter::count_below(std::uint64_t n) const {
  if (n > prefix_.horizon) throw PreconditionError("prefix count beyond the counter's horizon");
  std::uint64_t c = cumulative_[n / 64];
  if (n % 64) c += static_cast<std::uint64_t>(std::popcount(prefix_.words[n / 64] & detail::low_mask(n % 64)));
  return c;
}

}  // namespace densplit
