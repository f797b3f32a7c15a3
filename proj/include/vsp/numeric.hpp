#pragma once

// Scalar representations used by the model: exact GMP rationals (default)
// and IEEE doubles (large Monte Carlo runs).

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "vsp/errors.hpp"

namespace vsp {

using Rational = mpq_class;
using Integer = mpz_class;

enum class Arithmetic { rational, floating };

inline std::string to_string(Arithmetic a) {
  return a == Arithmetic::rational ? "rational" : "float";
}

inline Arithmetic parse_arithmetic(std::string_view s) {
  if (s == "rational") return Arithmetic::rational;
  if (s == "float") return Arithmetic::floating;
  throw ValidationError("arithmetic must be \"rational\" or \"float\", got \"" + std::string(s) + "\"");
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline Integer parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw ValidationError("not an integer: \"" + std::string(s) + "\"");
  Integer z(std::string(s), 10);
  return neg ? Integer(-z) : z;
}

inline Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace detail

/// Parses "p/q", an integer, or a decimal literal (optionally with an
/// exponent) into an exact rational. "0.255" becomes 51/200, never a
/// binary approximation.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw ValidationError("empty number");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer p = detail::parse_integer(s.substr(0, slash));
    Integer q = detail::parse_integer(s.substr(slash + 1));
    if (q == 0) throw ValidationError("zero denominator in \"" + std::string(text) + "\"");
    Rational r(p, q);
    r.canonicalize();
    return r;
  }

  bool neg = false;
  if (s.front() == '-' || s.front() == '+') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size())
      throw ValidationError("bad exponent in \"" + std::string(text) + "\"");
    s = s.substr(0, e);
  }
  std::string_view int_part = s, frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) throw ValidationError("not a number: \"" + std::string(text) + "\"");
  if ((!int_part.empty() && !detail::all_digits(int_part)) || (!frac_part.empty() && !detail::all_digits(frac_part)))
    throw ValidationError("not a number: \"" + std::string(text) + "\"");

  std::string digits = std::string(int_part) + std::string(frac_part);
  Integer mantissa(digits.empty() ? std::string("0") : digits, 10);
  long scale = static_cast<long>(frac_part.size()) - exponent;
  Rational r;
  if (scale >= 0) {
    r = Rational(mantissa, detail::pow10(static_cast<unsigned long>(scale)));
  } else {
    r = Rational(Integer(mantissa * detail::pow10(static_cast<unsigned long>(-scale))));
  }
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

/// Exact decimal value of a double via its shortest round-trip text, so a
/// JSON literal 0.255 maps to 51/200.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

/// Nearest double, ties to even. mpq's own get_d truncates towards zero,
/// which would turn 1/5 into 0.19999999999999998.
/// p/q in lowest terms; the two-argument mpq constructor does not reduce.
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& q) {
  const double d = q.get_d();
  if (Rational(d) == q || !std::isfinite(d)) return d;
  const double away = std::nextafter(d, q > 0 ? HUGE_VAL : -HUGE_VAL);
  const Rational gap_d = abs(q - Rational(d));
  const Rational gap_away = abs(Rational(away) - q);
  if (gap_d != gap_away) return gap_d < gap_away ? d : away;
  std::uint64_t bits = 0;
  std::memcpy(&bits, &d, sizeof bits);
  return (bits & 1u) == 0 ? d : away;
}

inline std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

inline Integer floor(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer ceil(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

/// Half-up decimal rendering with `digits` places ("0.420").
inline std::string to_decimal(const Rational& q, int digits) {
  Integer scale = detail::pow10(static_cast<unsigned long>(digits));
  Rational scaled = abs(q) * scale + Rational(1, 2);
  Integer units = floor(scaled);
  std::string s = units.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (q < 0 && units != 0) s.insert(0, "-");
  return s;
}

inline std::string to_decimal(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

/// Behaviour that differs between the two arithmetic modes.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr Arithmetic arithmetic = Arithmetic::rational;
  static Rational from_rational(const Rational& q) { return q; }
  static double to_double(const Rational& q) { return vsp::to_double(q); }
  static std::string to_string(const Rational& q) { return vsp::to_string(q); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr Arithmetic arithmetic = Arithmetic::floating;
  static double from_rational(const Rational& q) { return vsp::to_double(q); }
  static double to_double(double x) { return x; }
  static std::string to_string(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
  }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <Scalar T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

/// Appends a stable byte encoding of `value` to `out`.
inline void append_canonical(std::string& out, const Rational& q) {
  auto put = [&out](const Integer& z) {
    std::size_t count = 0;
    std::size_t bytes = (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8;
    std::string buf(bytes == 0 ? 1 : bytes, '\0');
    mpz_export(buf.data(), &count, 1, 1, 1, 0, z.get_mpz_t());
    buf.resize(count);
    auto len = static_cast<std::uint32_t>(count);
    char sign = static_cast<char>(sgn(z) < 0 ? 1 : 0);
    out.push_back(sign);
    for (int b = 3; b >= 0; --b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
    out += buf;
  };
  put(q.get_num());
  put(q.get_den());
}

inline void append_canonical(std::string& out, double x) {
  if (x == 0.0) x = 0.0;  // fold -0 into +0
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  for (int b = 7; b >= 0; --b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

}  // namespace vsp
