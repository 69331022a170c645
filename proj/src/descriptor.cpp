#include "densplit/descriptor.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "densplit/errors.hpp"

namespace densplit {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const IntervalPartition* partition) : text_(text), partition_(partition) {}

  OmegaSet parse() {
    OmegaSet s = set();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in set descriptor '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':' || c == '.' || c == '/') {
        ++pos_;
      } else {
        break;
      }
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  BigNat natural() {
    std::string w = word();
    if (w.empty() || w.find_first_not_of("0123456789") != std::string::npos) fail("expected a natural number");
    return BigNat(w);
  }

  std::uint64_t small() {
    BigNat n = natural();
    if (!fits_u64(n)) fail("number too large");
    return to_u64(n);
  }

  std::vector<bool> bits() {
    std::string w = word();
    std::vector<bool> out;
    for (char c : w) {
      if (c != '0' && c != '1') fail("expected a bit string");
      out.push_back(c == '1');
    }
    return out;
  }

  const IntervalPartition& partition() const {
    if (!partition_) throw PreconditionError("interval descriptor needs a partition (use --partition)");
    return *partition_;
  }

  OmegaSet set() {
    std::string name = word();
    if (name.empty()) fail("expected a set descriptor");
    if (name == "omega") return omega();
    if (name == "empty") return empty_set();
    if (name == "evens") return progression(0, 2);
    if (name == "odds") return progression(1, 2);
    if (name == "tower") return tower();
    if (name == "iv:first-half") return first_halves(partition()).as_set();
    if (name == "iv:last-half") return last_halves(partition()).as_set();
    if (name == "iv:singleton") return interval_minima(partition()).as_set();
    if (name == "iv:full") return all_intervals(partition()).as_set();
    if (name == "iv:alt") return alternating_intervals(partition()).as_set();
    if (name == "iv:empty") {
      return SymbolicSet(partition(), IntervalSubset::none, "iv:empty", Tri::yes, Tri::no).as_set();
    }
    if (name == "osc" && !peek('(')) return dyadic_bands(0);
    expect('(');
    OmegaSet result = compound(name);
    expect(')');
    return result;
  }

  OmegaSet compound(const std::string& name) {
    if (name == "prog") {
      std::uint64_t a = small();
      expect(',');
      return progression(a, small());
    }
    if (name == "bern") {
      Rational p = parse_rational(word());
      expect(',');
      return bernoulli(p, small());
    }
    if (name == "per") {
      std::vector<bool> prefix = peek(',') ? std::vector<bool>{} : bits();
      expect(',');
      return periodic(prefix, bits());
    }
    if (name == "pow") return powers_of(small());
    if (name == "osc") return dyadic_bands(static_cast<unsigned>(small()));
    if (name == "list") {
      std::vector<BigNat> elements;
      if (!peek(')')) {
        elements.push_back(natural());
        while (peek(',')) {
          ++pos_;
          elements.push_back(natural());
        }
      }
      return finite_set(std::move(elements));
    }
    if (name == "range") {
      BigNat lo = natural();
      expect(',');
      return range_set(lo, natural());
    }
    if (name == "alt") return every_other(set());
    if (name == "compl") return complement(set());
    if (name == "inter" || name == "union" || name == "diff") {
      OmegaSet a = set();
      expect(',');
      OmegaSet b = set();
      if (name == "inter") return intersect(a, b);
      if (name == "union") return unite(a, b);
      return difference(a, b);
    }
    if (name == "iv:trace") return traces(partition(), set()).as_set();
    if (name == "iv:capped") return capped_trace(partition(), set()).as_set();
    fail("unknown set constructor '" + name + "'");
  }

  std::string_view text_;
  const IntervalPartition* partition_;
  std::size_t pos_ = 0;
};

}  // namespace

OmegaSet parse_set(std::string_view text, const IntervalPartition* partition) {
  return Parser(text, partition).parse();
}

}  // namespace densplit
