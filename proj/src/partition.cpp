#include "densplit/partition.hpp"

#include <array>
#include <atomic>
#include <mutex>

#include "densplit/config.hpp"
#include "densplit/errors.hpp"
#include "densplit/set_node.hpp"

namespace densplit {

// ------------------------------------------------------------- growth rule

GrowthRule GrowthRule::parse(const std::string& text, bool even) {
  if (text == "minimal") return minimal(even);
  const std::string prefix = "factor:";
  if (text.rfind(prefix, 0) == 0) {
    Rational f = parse_rational(text.substr(prefix.size()));
    if (f < 1) throw PreconditionError("growth factor must be at least 1, got " + to_string(f));
    return scaled(f, even);
  }
  throw ParseError("unknown partition spec '" + text + "' (expected minimal or factor:<f>)");
}

std::string GrowthRule::describe() const {
  return mode == Mode::minimal ? std::string("minimal") : "factor:" + to_string(factor);
}

// --------------------------------------------------------------- partition

struct IntervalPartition::Impl {
  static constexpr std::size_t kChunk = 64;
  static constexpr std::size_t kChunks = (kMaxIntervals + 1 + kChunk - 1) / kChunk;

  std::optional<GrowthRule> rule;
  std::array<std::unique_ptr<std::array<BigNat, kChunk>>, kChunks> chunks;
  std::atomic<std::size_t> count{0};  // boundaries published so far
  std::mutex grow;

  const BigNat& at(std::size_t i) const { return (*chunks[i / kChunk])[i % kChunk]; }

  // Caller holds `grow`.
  void push(BigNat b) {
    const std::size_t i = count.load(std::memory_order_relaxed);
    if (i >= kMaxIntervals + 1) throw PreconditionError("partition depth limit reached");
    if (!chunks[i / kChunk]) chunks[i / kChunk] = std::make_unique<std::array<BigNat, kChunk>>();
    (*chunks[i / kChunk])[i % kChunk] = std::move(b);
    count.store(i + 1, std::memory_order_release);
  }

  BigNat required(std::size_t n) const {
    if (n == 0) return BigNat(2);
    BigNat r = at(n);
    mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), n);
    return r + 1;
  }

  BigNat next_size(std::size_t n) const {
    BigNat size = required(n);
    if (rule->mode == GrowthRule::Mode::factor) {
      Rational scaled = rule->factor * Rational(size);
      BigNat c;
      mpz_cdiv_q(c.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      size = c;
    }
    if (rule->even_sizes && mpz_odd_p(size.get_mpz_t())) size += 1;
    return size;
  }

  void ensure(std::size_t boundaries) {
    if (count.load(std::memory_order_acquire) >= boundaries) return;
    if (!rule) {
      throw PreconditionError("fixed partition has only " +
                              std::to_string(count.load(std::memory_order_acquire) - 1) + " intervals");
    }
    if (boundaries > kMaxIntervals + 1) throw PreconditionError("partition depth limit reached");
    std::lock_guard lock(grow);
    while (count.load(std::memory_order_relaxed) < boundaries) {
      const std::size_t n = count.load(std::memory_order_relaxed) - 1;
      push(at(n) + next_size(n));
    }
  }
};

IntervalPartition IntervalPartition::build(const GrowthRule& rule, std::size_t count) {
  if (count < 1) throw PreconditionError("partition needs at least one interval");
  if (rule.mode == GrowthRule::Mode::factor && rule.factor < 1) {
    throw PreconditionError("growth factor must be at least 1");
  }
  auto impl = std::make_shared<Impl>();
  impl->rule = rule;
  {
    std::lock_guard lock(impl->grow);
    impl->push(BigNat(0));
  }
  impl->ensure(count + 1);
  return IntervalPartition(impl);
}

IntervalPartition IntervalPartition::minimal(std::size_t count, bool even_sizes) {
  return build(GrowthRule::minimal(even_sizes), count);
}

IntervalPartition IntervalPartition::from_boundaries(std::vector<BigNat> boundaries) {
  if (boundaries.size() < 2) throw PreconditionError("need at least two boundaries");
  if (sgn(boundaries.front()) != 0) throw PreconditionError("first boundary must be 0");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) throw PreconditionError("boundaries must be strictly increasing");
  }
  auto impl = std::make_shared<Impl>();
  std::lock_guard lock(impl->grow);
  for (auto& b : boundaries) impl->push(std::move(b));
  return IntervalPartition(impl);
}

bool IntervalPartition::extensible() const { return impl_->rule.has_value(); }
const std::optional<GrowthRule>& IntervalPartition::rule() const { return impl_->rule; }

std::size_t IntervalPartition::materialized() const {
  return impl_->count.load(std::memory_order_acquire) - 1;
}

BigNat IntervalPartition::start(std::size_t n) const {
  impl_->ensure(n + 1);
  return impl_->at(n);
}

std::size_t IntervalPartition::interval_of(const BigNat& x) const {
  if (sgn(x) < 0) throw PreconditionError("interval_of needs a natural number");
  std::size_t have = impl_->count.load(std::memory_order_acquire);
  while (impl_->at(have - 1) <= x) {
    impl_->ensure(have + 1);
    have = impl_->count.load(std::memory_order_acquire);
  }
  // Largest i with b_i <= x, among b_0..b_{have-1}.
  std::size_t lo = 0;
  std::size_t hi = have - 1;
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (impl_->at(mid) <= x) lo = mid; else hi = mid;
  }
  return lo;
}

BigNat IntervalPartition::minimum_size(std::size_t n) const {
  impl_->ensure(n + 1);
  return impl_->required(n);
}

std::string IntervalPartition::describe() const {
  if (!impl_->rule) return "raw";
  return impl_->rule->describe() + (impl_->rule->even_sizes ? ",even" : "");
}

GrowthVerdict verify_growth(const IntervalPartition& p, std::size_t depth) {
  const std::size_t n_max = p.extensible() ? depth : std::min(depth, p.materialized());
  const bool even = p.rule() && p.rule()->even_sizes;
  for (std::size_t n = 0; n < n_max; ++n) {
    BigNat size = p.size(n);
    if (size < p.minimum_size(n)) {
      std::string why = n == 0 ? "|I_0| = " + size.get_str() + " < 2"
                               : "|I_" + std::to_string(n) + "| = " + size.get_str() + " is not above 2^" +
                                     std::to_string(n) + " * " + p.start(n).get_str();
      return {false, n, why};
    }
    if (even && mpz_odd_p(size.get_mpz_t())) {
      return {false, n, "|I_" + std::to_string(n) + "| is odd"};
    }
  }
  return {};
}

// ---------------------------------------------------------- interval subset

IntervalSubset IntervalSubset::full(const IntervalPartition& p, std::size_t n) {
  BigNat size = p.size(n);
  return {n, Kind::full, omega(), size, size, "full"};
}

IntervalSubset IntervalSubset::none(const IntervalPartition& p, std::size_t n) {
  return {n, Kind::empty, empty_set(), BigNat(0), p.size(n), "empty"};
}

IntervalSubset IntervalSubset::first(const IntervalPartition& p, std::size_t n, const BigNat& s) {
  BigNat size = p.size(n);
  if (sgn(s) < 0 || s > size) throw PreconditionError("subset larger than its interval");
  BigNat lo = p.start(n);
  return {n, Kind::first, range_set(lo, lo + s), s, size, "first(" + s.get_str() + ")"};
}

IntervalSubset IntervalSubset::last(const IntervalPartition& p, std::size_t n, const BigNat& s) {
  BigNat size = p.size(n);
  if (sgn(s) < 0 || s > size) throw PreconditionError("subset larger than its interval");
  BigNat hi = p.end(n);
  return {n, Kind::last, range_set(hi - s, hi), s, size, "last(" + s.get_str() + ")"};
}

IntervalSubset IntervalSubset::singleton(const IntervalPartition& p, std::size_t n) {
  BigNat lo = p.start(n);
  return {n, Kind::singleton, range_set(lo, lo + 1), BigNat(1), p.size(n), "min"};
}

IntervalSubset IntervalSubset::trace(const IntervalPartition& p, std::size_t n, const OmegaSet& s) {
  BigNat card = count_range(s, p.start(n), p.end(n));
  return {n, Kind::trace, s, card, p.size(n), "trace(" + s.describe() + ")"};
}

IntervalSubset IntervalSubset::complement_trace(const IntervalPartition& p, std::size_t n, const OmegaSet& s) {
  BigNat size = p.size(n);
  BigNat card = size - count_range(s, p.start(n), p.end(n));
  return {n, Kind::complement_trace, complement(s), card, size, "minus(" + s.describe() + ")"};
}

IntervalSubset IntervalSubset::bits(const IntervalPartition& p, std::size_t n, const std::vector<bool>& bits) {
  BigNat size = p.size(n);
  if (!fits_u64(size) || to_u64(size) > explicit_cap()) {
    throw HorizonOverflow("explicit subset of I_" + std::to_string(n) + " exceeds the explicit cap");
  }
  if (big(bits.size()) != size) throw PreconditionError("bit vector length differs from |I_n|");
  const BigNat lo = p.start(n);
  std::vector<BigNat> members;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) members.push_back(lo + big(i));
  }
  BigNat card = big(members.size());
  return {n, Kind::bits, finite_set(std::move(members)), card, size, "bits"};
}

IntervalSubset IntervalSubset::custom(const IntervalPartition& p, std::size_t n, const OmegaSet& pattern,
                                      std::string label) {
  BigNat card = count_range(pattern, p.start(n), p.end(n));
  return {n, Kind::custom, pattern, card, p.size(n), std::move(label)};
}

std::string IntervalSubset::label() const { return label_; }

// ------------------------------------------------------------ symbolic set

class SymbolicSet::Node final : public PiecewiseNode {
 public:
  Node(IntervalPartition partition, SubsetRule rule, std::string label, Tri finite, Tri cofinite,
       std::map<std::size_t, IntervalSubset> overrides)
      : PiecewiseNode(std::move(label), false),
        partition_(std::move(partition)),
        rule_(std::move(rule)),
        finite_(finite),
        cofinite_(cofinite),
        overrides_(std::move(overrides)) {}

  const IntervalSubset& on(std::size_t k) const {
    if (auto it = overrides_.find(k); it != overrides_.end()) return it->second;
    {
      std::lock_guard lock(memo_mutex_);
      if (auto it = memo_.find(k); it != memo_.end()) return *it->second;
    }
    auto value = std::make_unique<IntervalSubset>(rule_(partition_, k));
    if (value->index() != k) throw PreconditionError("subset rule returned a subset of the wrong interval");
    std::lock_guard lock(memo_mutex_);
    auto [it, inserted] = memo_.try_emplace(k, std::move(value));
    return *it->second;
  }

  std::vector<Piece> pieces(const BigNat& lo, const BigNat& hi) const override {
    std::vector<Piece> out;
    if (lo >= hi) return out;
    for (std::size_t k = partition_.interval_of(lo);; ++k) {
      BigNat a = partition_.start(k);
      if (a >= hi) break;
      BigNat b = partition_.end(k);
      const IntervalSubset& sub = on(k);
      bool whole = a >= lo && b <= hi;
      std::optional<BigNat> card;
      if (whole) card = sub.cardinality();
      else if (sgn(sub.cardinality()) == 0) card = BigNat(0);
      out.push_back({std::max(a, lo), std::min(b, hi), sub.pattern(), card});
    }
    return out;
  }

  Tri finite() const override { return finite_; }
  Tri cofinite() const override { return cofinite_; }

  const IntervalPartition& partition() const { return partition_; }
  const SubsetRule& rule() const { return rule_; }
  const std::map<std::size_t, IntervalSubset>& overrides() const { return overrides_; }

 private:
  IntervalPartition partition_;
  SubsetRule rule_;
  Tri finite_;
  Tri cofinite_;
  std::map<std::size_t, IntervalSubset> overrides_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::size_t, std::unique_ptr<IntervalSubset>> memo_;
};

SymbolicSet::SymbolicSet(IntervalPartition partition, SubsetRule rule, std::string label, Tri finite,
                         Tri cofinite)
    : node_(std::make_shared<Node>(std::move(partition), std::move(rule), std::move(label), finite, cofinite,
                                   std::map<std::size_t, IntervalSubset>{})) {}

const IntervalPartition& SymbolicSet::partition() const { return node_->partition(); }
const IntervalSubset& SymbolicSet::on(std::size_t k) const { return node_->on(k); }
OmegaSet SymbolicSet::as_set() const { return OmegaSet(node_); }
const std::string& SymbolicSet::label() const { return node_->describe(); }

SymbolicSet SymbolicSet::with(const std::map<std::size_t, IntervalSubset>& changes) const {
  auto merged = node_->overrides();
  for (const auto& [k, v] : changes) {
    if (v.index() != k) throw PreconditionError("override placed on the wrong interval");
    merged.insert_or_assign(k, v);
  }
  std::string label = node_->describe();
  if (label.find('*') == std::string::npos) label += "*";
  return SymbolicSet(std::make_shared<Node>(node_->partition(), node_->rule(), label, node_->finite(),
                                            node_->cofinite(), std::move(merged)));
}

BigNat SymbolicSet::count_before(std::size_t k) const {
  BigNat total = 0;
  for (std::size_t j = 0; j < k; ++j) total += on(j).cardinality();
  return total;
}

std::optional<SymbolicSet> as_symbolic(const OmegaSet& s) {
  auto node = std::dynamic_pointer_cast<const SymbolicSet::Node>(s.ptr());
  if (!node) return std::nullopt;
  return SymbolicSet(node);
}

// ---------------------------------------------------------------- builders

namespace {

BigNat half_up(const BigNat& n) { return BigNat((n + 1) / 2); }

}  // namespace

SymbolicSet first_halves(const IntervalPartition& p) {
  return SymbolicSet(
      p, [](const IntervalPartition& q, std::size_t k) { return IntervalSubset::first(q, k, half_up(q.size(k))); },
      "iv:first-half");
}

SymbolicSet last_halves(const IntervalPartition& p) {
  return SymbolicSet(
      p, [](const IntervalPartition& q, std::size_t k) { return IntervalSubset::last(q, k, half_up(q.size(k))); },
      "iv:last-half");
}

SymbolicSet interval_minima(const IntervalPartition& p) {
  return SymbolicSet(p, IntervalSubset::singleton, "iv:singleton");
}

SymbolicSet all_intervals(const IntervalPartition& p) {
  return SymbolicSet(p, IntervalSubset::full, "iv:full", Tri::no, Tri::yes);
}

SymbolicSet alternating_intervals(const IntervalPartition& p) {
  return SymbolicSet(
      p,
      [](const IntervalPartition& q, std::size_t k) {
        return k % 2 == 0 ? IntervalSubset::full(q, k) : IntervalSubset::none(q, k);
      },
      "iv:alt", Tri::no, Tri::no);
}

SymbolicSet capped_trace(const IntervalPartition& p, const OmegaSet& s) {
  return SymbolicSet(
      p,
      [s](const IntervalPartition& q, std::size_t k) {
        BigNat end = q.end(k);
        if (fits_u64(end) && to_u64(end) <= explicit_cap()) return IntervalSubset::trace(q, k, s);
        return IntervalSubset::trace(q, k, progression(0, 2));
      },
      "iv:capped(" + s.describe() + ")", s.finite() == Tri::yes ? Tri::unknown : Tri::no);
}

SymbolicSet traces(const IntervalPartition& p, const OmegaSet& s) {
  return SymbolicSet(
      p, [s](const IntervalPartition& q, std::size_t k) { return IntervalSubset::trace(q, k, s); },
      "iv:trace(" + s.describe() + ")", s.finite(), s.cofinite());
}

}  // namespace densplit
