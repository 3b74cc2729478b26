#pragma once

// Shared vocabulary: exact rationals, high-precision reals, symbol strings
// and the error hierarchy.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mclab {

// Expression templates off: values are always concrete numbers.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>, boost::multiprecision::et_off>;

// Strings over an alphabet of at most 16 symbols are stored as hex digits,
// so a binary string is an ordinary "0101" std::string.
inline constexpr int kMaxAlphabet = 16;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class BudgetError : public Error {
 public:
  using Error::Error;
};

class NullEventError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DigestMismatch : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline int symbol_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  throw std::invalid_argument(std::string("not a symbol: '") + c + "'");
}

inline char symbol_char(int v) {
  if (v < 0 || v >= kMaxAlphabet) throw std::invalid_argument("symbol out of range");
  return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

inline bool is_word_over(std::string_view x, int alphabet) {
  for (char c : x) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    if (symbol_value(c) >= alphabet) return false;
  }
  return true;
}

inline bool is_binary(std::string_view x) { return is_word_over(x, 2); }

inline bool is_prefix(std::string_view prefix, std::string_view s) {
  return prefix.size() <= s.size() && s.substr(0, prefix.size()) == prefix;
}

// Bits needed per symbol when a |X|-ary string is fed to a binary machine.
inline int block_width(int alphabet) {
  int w = 0;
  while ((1 << w) < alphabet) ++w;
  return w;
}

inline std::string block_encode(std::string_view x, int alphabet) {
  if (alphabet == 2) return std::string(x);
  const int w = block_width(alphabet);
  std::string out;
  out.reserve(x.size() * static_cast<std::size_t>(w));
  for (char c : x) {
    const int v = symbol_value(c);
    for (int b = w - 1; b >= 0; --b) out.push_back(((v >> b) & 1) ? '1' : '0');
  }
  return out;
}

// 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
inline std::uint64_t zigzag(std::int64_t n) {
  return n >= 0 ? static_cast<std::uint64_t>(n) * 2
                : static_cast<std::uint64_t>(-(n + 1)) * 2 + 1;
}

// Minimal binary representation; 0 maps to "0".
inline std::string minimal_binary(std::uint64_t v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), (v & 1) ? '1' : '0');
    v >>= 1;
  }
  return s;
}

inline std::string zigzag_code(std::int64_t n) { return minimal_binary(zigzag(n)); }

// 2^e for any integer e.
inline Rational dyadic(long e) {
  Integer one = 1;
  if (e >= 0) return Rational(Integer(one << static_cast<unsigned>(e)));
  return Rational(one, Integer(one << static_cast<unsigned>(-e)));
}

inline Real to_real(const Rational& q) { return Real(q); }

inline Real real_infinity() { return std::numeric_limits<Real>::infinity(); }

// Smallest integer m with 2^m >= q, for q > 0.
inline long ceil_log2(const Rational& q) {
  if (q <= 0) throw std::domain_error("ceil_log2 of nonpositive value");
  const Integer num = boost::multiprecision::numerator(q);
  const Integer den = boost::multiprecision::denominator(q);
  long m = static_cast<long>(boost::multiprecision::msb(num)) -
           static_cast<long>(boost::multiprecision::msb(den));
  while (dyadic(m) < q) ++m;
  while (dyadic(m - 1) >= q) --m;
  return m;
}

inline Real log2_of(const Rational& q) {
  if (q <= 0) return -real_infinity();
  return boost::multiprecision::log2(to_real(q));
}

inline Real ln_of(const Rational& q) {
  if (q <= 0) return -real_infinity();
  return boost::multiprecision::log(to_real(q));
}

}  // namespace mclab
