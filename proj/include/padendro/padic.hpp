#pragma once

// Exact p-adic arithmetic on rationals: valuations, norms, digit expansions
// and the disks that make up the vertices of the Bruhat-Tits tree.
//
// Nothing in here touches floating point. Valuations are integers extended
// by +inf (the valuation of zero) and -inf (the level at which a finite point
// meets the end at infinity).

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "padendro/error.hpp"

namespace padendro {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Non-negative remainder of a modulo m (m > 0).
inline BigInt floor_mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

// Inverse of a modulo m; a and m must be coprime.
inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
  BigInt old_r = floor_mod(a, m), r = m;
  BigInt old_s = 1, s = 0;
  while (r != 0) {
    BigInt q = old_r / r;
    BigInt tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw InvalidArgument("mod_inverse: arguments are not coprime");
  return floor_mod(old_s, m);
}

inline BigInt big_pow(std::uint64_t base, std::uint64_t exp) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp));
}

}  // namespace detail

// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  constexpr std::array<std::uint64_t, 12> witnesses{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto w : witnesses) {
    if (n % w == 0) return n == w;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (auto a : witnesses) {
    std::uint64_t x = detail::pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = detail::mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class Prime {
 public:
  explicit Prime(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) throw InvalidPrime(std::to_string(p) + " is not a prime");
  }

  std::uint64_t value() const noexcept { return p_; }
  BigInt big() const { return BigInt(p_); }

  friend bool operator==(const Prime&, const Prime&) = default;

 private:
  std::uint64_t p_;
};

// An integer extended by -inf and +inf.
class Valuation {
 public:
  constexpr Valuation(std::int64_t v = 0) noexcept : kind_(Kind::finite), value_(v) {}  // NOLINT

  static constexpr Valuation infinity() noexcept { return Valuation(Kind::plus_infinity); }
  static constexpr Valuation minus_infinity() noexcept { return Valuation(Kind::minus_infinity); }

  constexpr bool is_finite() const noexcept { return kind_ == Kind::finite; }
  constexpr bool is_infinity() const noexcept { return kind_ == Kind::plus_infinity; }
  constexpr bool is_minus_infinity() const noexcept { return kind_ == Kind::minus_infinity; }

  std::int64_t value() const {
    if (!is_finite()) throw InvalidArgument("valuation " + to_string() + " is not finite");
    return value_;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::plus_infinity:
        return "inf";
      case Kind::minus_infinity:
        return "-inf";
      case Kind::finite:
        break;
    }
    return std::to_string(value_);
  }

  // min/plus conventions; -inf + inf is rejected.
  friend Valuation operator+(const Valuation& a, const Valuation& b) {
    if (a.is_finite() && b.is_finite()) return Valuation(a.value_ + b.value_);
    if ((a.is_infinity() && b.is_minus_infinity()) || (a.is_minus_infinity() && b.is_infinity())) {
      throw InvalidArgument("inf + -inf is undefined");
    }
    return a.is_finite() ? b : a;
  }

  friend constexpr bool operator==(const Valuation& a, const Valuation& b) noexcept {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) noexcept {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    if (a.kind_ != Kind::finite) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

 private:
  enum class Kind : std::uint8_t { minus_infinity = 0, finite = 1, plus_infinity = 2 };

  constexpr explicit Valuation(Kind k) noexcept : kind_(k), value_(0) {}

  Kind kind_;
  std::int64_t value_;
};

inline Valuation min(const Valuation& a, const Valuation& b) { return b < a ? b : a; }

// ---------------------------------------------------------------------------
// Rationals

inline std::string to_string(const Rational& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) s += "/" + denominator(x).str();
  return s;
}

// Parses "a", "-a", "+a" or "a/b" with decimal integers a, b (b != 0).
inline Rational parse_rational(std::string_view text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ParseError("empty number", 1, 1);
  const auto slash = s.find('/');
  auto parse_int = [&](std::string_view part, std::size_t offset, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i == part.size()) throw ParseError("expected digits in '" + s + "'", 1, offset + i + 1);
    for (std::size_t k = i; k < part.size(); ++k) {
      if (part[k] < '0' || part[k] > '9') {
        throw ParseError("unexpected character '" + std::string(1, part[k]) + "' in '" + s + "'", 1,
                         offset + k + 1);
      }
    }
    BigInt v(std::string(part.substr(i)));
    return (!part.empty() && part[0] == '-') ? BigInt(-v) : v;
  };
  if (slash == std::string::npos) return Rational(parse_int(s, 0, true));
  const BigInt num = parse_int(std::string_view(s).substr(0, slash), 0, true);
  const BigInt den = parse_int(std::string_view(s).substr(slash + 1), slash + 1, false);
  if (den == 0) throw ParseError("zero denominator in '" + s + "'", 1, slash + 2);
  return Rational(num, den);
}

// ---------------------------------------------------------------------------
// Points of the projective line over Q_p (rational ones only).

class ExtendedPoint {
 public:
  ExtendedPoint(Rational x) : value_(std::move(x)) {}  // NOLINT
  ExtendedPoint(int x) : value_(Rational(x)) {}        // NOLINT

  static ExtendedPoint infinity() { return ExtendedPoint(); }

  bool is_infinity() const noexcept { return !value_.has_value(); }

  const Rational& finite() const {
    if (!value_) throw InvalidArgument("the point at infinity has no finite value");
    return *value_;
  }

  friend bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;

 private:
  ExtendedPoint() = default;

  std::optional<Rational> value_;
};

inline std::string to_string(const ExtendedPoint& x) {
  return x.is_infinity() ? std::string("inf") : to_string(x.finite());
}

inline ExtendedPoint parse_point(std::string_view text) {
  const std::string s = detail::trim(text);
  if (s == "inf" || s == "infinity" || s == "∞") return ExtendedPoint::infinity();
  return parse_rational(s);
}

// ---------------------------------------------------------------------------
// Valuations and norms

inline Valuation valuation(const BigInt& n, const Prime& p) {
  if (n == 0) return Valuation::infinity();
  if (p.value() == 2) return Valuation(static_cast<std::int64_t>(boost::multiprecision::lsb(abs(n))));
  const BigInt pp = p.big();
  BigInt q = abs(n), r;
  std::int64_t v = 0;
  for (;;) {
    BigInt next;
    boost::multiprecision::divide_qr(q, pp, next, r);
    if (r != 0) break;
    q = std::move(next);
    ++v;
  }
  return Valuation(v);
}

inline Valuation valuation(const Rational& x, const Prime& p) {
  if (x == 0) return Valuation::infinity();
  return Valuation(valuation(numerator(x), p).value() - valuation(denominator(x), p).value());
}

// |x|_p as an exact power of p: zero, or 1 * p^exponent.
struct Norm {
  int mantissa = 0;
  std::int64_t exponent = 0;

  bool is_zero() const noexcept { return mantissa == 0; }

  std::string to_string(const Prime& p) const {
    if (is_zero()) return "0";
    if (exponent == 0) return "1";
    return std::to_string(p.value()) + "^" + std::to_string(exponent);
  }

  friend bool operator==(const Norm&, const Norm&) = default;
};

inline Norm norm(const Rational& x, const Prime& p) {
  const Valuation v = valuation(x, p);
  if (v.is_infinity()) return Norm{};
  return Norm{1, -v.value()};
}

// Valuation of x - y. Against the point at infinity the result is -inf: the
// two ends only meet through the end at infinity, below every finite level.
inline Valuation pairwise_valuation(const ExtendedPoint& x, const ExtendedPoint& y, const Prime& p) {
  if (x.is_infinity() && y.is_infinity()) return Valuation::infinity();
  if (x.is_infinity() || y.is_infinity()) return Valuation::minus_infinity();
  return valuation(Rational(x.finite() - y.finite()), p);
}

// ---------------------------------------------------------------------------
// Digit expansions

// Truncated p-adic expansion sum_k digits[k] * p^(leading_exponent + k).
// Trailing zero digits are dropped; `precision` is the absolute precision,
// i.e. the expansion agrees with the source modulo p^precision.
struct PAdicApprox {
  Prime prime;
  std::int64_t leading_exponent = 0;
  std::vector<std::uint64_t> digits;
  std::int64_t precision = 0;

  std::uint64_t digit_at(std::int64_t position) const {
    const std::int64_t k = position - leading_exponent;
    if (k < 0 || k >= static_cast<std::int64_t>(digits.size())) return 0;
    return digits[static_cast<std::size_t>(k)];
  }

  Rational value() const {
    Rational v = 0;
    const BigInt pp = prime.big();
    for (std::size_t k = digits.size(); k-- > 0;) {
      v = v * pp + digits[k];
    }
    const std::int64_t m = leading_exponent;
    const BigInt scale = detail::big_pow(prime.value(), static_cast<std::uint64_t>(m < 0 ? -m : m));
    return m >= 0 ? Rational(v * scale) : Rational(v / scale);
  }
};

// The first num_digits digits of x starting at its leading exponent.
inline PAdicApprox digits(const Rational& x, const Prime& p, std::int64_t num_digits) {
  if (num_digits <= 0) throw InvalidArgument("digits: num_digits must be positive");
  PAdicApprox out{p, 0, {}, num_digits};
  if (x == 0) return out;
  const std::int64_t m = valuation(x, p).value();
  out.leading_exponent = m;
  out.precision = m + num_digits;

  const BigInt pp = p.big();
  const BigInt shift = detail::big_pow(p.value(), static_cast<std::uint64_t>(m < 0 ? -m : m));
  // unit part u/v with p dividing neither
  BigInt u = numerator(x), v = denominator(x);
  if (m > 0) u /= shift;
  if (m < 0) v /= shift;

  // residue of u/v modulo p^num_digits, then peel off base-p digits
  const BigInt modulus = detail::big_pow(p.value(), static_cast<std::uint64_t>(num_digits));
  BigInt r = detail::floor_mod(u * detail::mod_inverse(v, modulus), modulus);
  out.digits.reserve(static_cast<std::size_t>(num_digits));
  for (std::int64_t k = 0; k < num_digits && r != 0; ++k) {
    BigInt q, d;
    boost::multiprecision::divide_qr(r, pp, q, d);
    out.digits.push_back(static_cast<std::uint64_t>(d));
    r = std::move(q);
  }
  return out;
}

// Renders "[d_k ... d_0]_p", most significant digit first, padded with zeros
// to `width` positions 0..width-1. Digits for p > 10 are comma separated and
// a '.' separates position 0 from negative positions.
inline std::string render_expansion(const PAdicApprox& a, std::int64_t width = 0) {
  std::int64_t top = width - 1;
  if (!a.digits.empty()) top = std::max(top, a.leading_exponent + static_cast<std::int64_t>(a.digits.size()) - 1);
  top = std::max<std::int64_t>(top, 0);
  const std::int64_t bottom = std::min<std::int64_t>(0, a.leading_exponent);
  const bool separated = a.prime.value() > 10;
  std::ostringstream os;
  os << '[';
  for (std::int64_t pos = top; pos >= bottom; --pos) {
    if (pos != top && separated && pos != -1) os << ',';
    if (pos == -1) os << '.';
    os << a.digit_at(pos);
  }
  os << "]_" << a.prime.value();
  return os.str();
}

// ---------------------------------------------------------------------------
// Disks

enum class DiskRelation { equal, first_inside_second, second_inside_first, disjoint };

inline std::string to_string(DiskRelation r) {
  switch (r) {
    case DiskRelation::equal:
      return "EQUAL";
    case DiskRelation::first_inside_second:
      return "D1_INSIDE_D2";
    case DiskRelation::second_inside_first:
      return "D2_INSIDE_D1";
    case DiskRelation::disjoint:
      break;
  }
  return "DISJOINT";
}

class Disk;
Disk disk_of(const Rational& x, std::int64_t r, const Prime& p);

// Closed disk {x : |x - center|_p <= p^-r}. The center is canonical: the
// expansion of any member truncated below position r.
class Disk {
 public:
  const Prime& prime() const noexcept { return prime_; }
  std::int64_t radius_exponent() const noexcept { return r_; }
  const Rational& center() const noexcept { return center_; }

  bool contains(const Rational& x) const { return valuation(Rational(x - center_), prime_) >= Valuation(r_); }

  // The minimal disk properly containing this one.
  Disk parent() const { return disk_of(center_, r_ - 1, prime_); }

  // The p maximal proper subdisks, ordered by the digit at position r.
  std::vector<Disk> children() const {
    std::vector<Disk> out;
    const std::uint64_t p = prime_.value();
    out.reserve(static_cast<std::size_t>(p));
    const Rational step = r_ >= 0 ? Rational(detail::big_pow(p, static_cast<std::uint64_t>(r_)))
                                  : Rational(BigInt(1), detail::big_pow(p, static_cast<std::uint64_t>(-r_)));
    for (std::uint64_t d = 0; d < p; ++d) out.push_back(Disk(prime_, r_ + 1, center_ + step * d));
    return out;
  }

  friend bool operator==(const Disk&, const Disk&) = default;

 private:
  friend Disk disk_of(const Rational& x, std::int64_t r, const Prime& p);

  Disk(Prime p, std::int64_t r, Rational center) : prime_(p), r_(r), center_(std::move(center)) {}

  Prime prime_;
  std::int64_t r_;
  Rational center_;
};

inline Disk disk_of(const Rational& x, std::int64_t r, const Prime& p) {
  if (x == 0) return Disk(p, r, Rational(0));
  const std::int64_t m = valuation(x, p).value();
  if (m >= r) return Disk(p, r, Rational(0));
  // x = p^m * u/v; center = p^m * ((u/v) mod p^(r-m))
  const BigInt shift = detail::big_pow(p.value(), static_cast<std::uint64_t>(m < 0 ? -m : m));
  BigInt u = numerator(x), v = denominator(x);
  if (m > 0) u /= shift;
  if (m < 0) v /= shift;
  const BigInt modulus = detail::big_pow(p.value(), static_cast<std::uint64_t>(r - m));
  const BigInt residue = detail::floor_mod(u * detail::mod_inverse(v, modulus), modulus);
  Rational center = m >= 0 ? Rational(residue * shift) : Rational(residue, shift);
  return Disk(p, r, std::move(center));
}

inline DiskRelation disk_relation(const Disk& a, const Disk& b) {
  if (!(a.prime() == b.prime())) throw PrimeMismatch("disk_relation: disks over different primes");
  const Valuation gap = valuation(Rational(a.center() - b.center()), a.prime());
  const std::int64_t ra = a.radius_exponent(), rb = b.radius_exponent();
  if (ra == rb) return a.center() == b.center() ? DiskRelation::equal : DiskRelation::disjoint;
  if (ra > rb) return gap >= Valuation(rb) ? DiskRelation::first_inside_second : DiskRelation::disjoint;
  return gap >= Valuation(ra) ? DiskRelation::second_inside_first : DiskRelation::disjoint;
}

inline std::string to_string(const Disk& d) {
  return "B(" + to_string(d.center()) + ", " + std::to_string(d.prime().value()) + "^" +
         std::to_string(-d.radius_exponent()) + ")";
}

}  // namespace padendro
