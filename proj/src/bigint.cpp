#include "densplit/bigint.hpp"

#include <cctype>

#include "densplit/errors.hpp"

namespace densplit {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw ParseError("malformed rational: " + std::string(text));
    }
    BigNat d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator: " + std::string(text));
    q = Rational(BigNat(std::string(num)), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw ParseError("malformed decimal: " + std::string(text));
    }
    BigNat scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    BigNat digits(std::string(whole.empty() ? "0" : whole) + std::string(frac));
    q = Rational(digits, scale);
  } else {
    if (!all_digits(s)) throw ParseError("malformed number: " + std::string(text));
    q = Rational(BigNat(std::string(s)));
  }
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

std::string to_string(const Rational& q) {
  Rational c(q);
  c.canonicalize();
  return c.get_str();
}

std::string to_string(const BigNat& n) { return n.get_str(); }

BigNat big(std::uint64_t v) {
  static_assert(sizeof(unsigned long) == sizeof(std::uint64_t));
  return BigNat(static_cast<unsigned long>(v));
}

bool fits_u64(const BigNat& n) { return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

std::uint64_t to_u64(const BigNat& n) { return static_cast<std::uint64_t>(n.get_ui()); }

Rational pow2(long exponent) {
  BigNat p(1);
  if (exponent >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
  return Rational(BigNat(1), p);
}

Rational ratio(const BigNat& num, const BigNat& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace densplit
