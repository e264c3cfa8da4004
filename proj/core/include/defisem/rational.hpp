#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace defisem {

using Int = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                           boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline Int rat_num(const Rat& x) { return boost::multiprecision::numerator(x); }
inline Int rat_den(const Rat& x) { return boost::multiprecision::denominator(x); }

// Parses "123", "-4/7", "1.25", "-0.5". Exact: no floating point involved.
std::optional<Rat> rat_parse(std::string_view text);

// Lowest terms, "n" when the denominator is 1, otherwise "n/d".
std::string rat_str(const Rat& x);

// Fixed-point decimal string with `precision` fractional digits,
// rounding ties away from zero. precision 0 yields a plain integer string.
std::string rat_display(const Rat& x, int precision);

// The integer numerator of rat_display's result scaled by 10^precision.
Int rat_round_scaled(const Rat& x, int precision);

// Largest multiple of 1/den that is <= x (den > 0).
Rat rat_floor_to(const Rat& x, const Int& den);

// floor(sqrt(n)) for n >= 0.
Int int_sqrt(const Int& n);

// Extended value for ratios with zero denominator (collateralization of
// a loan-free account). finite==false means positive infinity.
struct ExtRat {
  bool finite = true;
  Rat value{};

  static ExtRat infinity() { return ExtRat{false, Rat(0)}; }
  static ExtRat of(Rat v) { return ExtRat{true, std::move(v)}; }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.finite != b.finite) return false;
    return !a.finite || a.value == b.value;
  }
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (!a.finite) return false;
    if (!b.finite) return true;
    return a.value < b.value;
  }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a == b || a < b; }
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }
};

std::string ext_str(const ExtRat& x);
std::string ext_display(const ExtRat& x, int precision);

}  // namespace defisem
