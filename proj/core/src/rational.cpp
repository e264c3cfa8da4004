#include "defisem/rational.hpp"

#include <cctype>

namespace defisem {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Int pow10(int n) {
  Int r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

Int digits_to_int(std::string_view s) {
  size_t i = 0;
  while (i + 1 < s.size() && s[i] == '0') ++i;
  return Int{std::string(s.substr(i))};
}

}  // namespace

std::optional<Rat> rat_parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  if (text.front() == '+' || text.front() == '-') {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;

  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    Int d = digits_to_int(den);
    if (d == 0) return std::nullopt;
    Rat r(digits_to_int(num), d);
    return neg ? Rat(-r) : r;
  }

  auto dot = text.find('.');
  if (dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (!whole.empty() && !all_digits(whole)) return std::nullopt;
    if (!frac.empty() && !all_digits(frac)) return std::nullopt;
    Int w = whole.empty() ? Int(0) : digits_to_int(whole);
    Int f = frac.empty() ? Int(0) : digits_to_int(frac);
    Int scale = pow10(static_cast<int>(frac.size()));
    Rat r(w * scale + f, scale);
    return neg ? Rat(-r) : r;
  }

  if (!all_digits(text)) return std::nullopt;
  Rat r{digits_to_int(text)};
  return neg ? Rat(-r) : r;
}

std::string rat_str(const Rat& x) {
  Int n = rat_num(x);
  Int d = rat_den(x);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

Int rat_round_scaled(const Rat& x, int precision) {
  Int scale = pow10(precision);
  Int n = rat_num(x) * scale;
  Int d = rat_den(x);
  bool neg = n < 0;
  if (neg) n = -n;
  Int q = n / d;
  Int r = n % d;
  if (r * 2 >= d) ++q;
  return neg ? Int(-q) : q;
}

std::string rat_display(const Rat& x, int precision) {
  Int scaled = rat_round_scaled(x, precision);
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string digits = scaled.str();
  std::string out;
  if (precision == 0) {
    out = digits;
  } else {
    if (static_cast<int>(digits.size()) <= precision) {
      digits.insert(0, precision + 1 - digits.size(), '0');
    }
    out = digits.substr(0, digits.size() - precision) + "." +
          digits.substr(digits.size() - precision);
  }
  return neg ? "-" + out : out;
}

Rat rat_floor_to(const Rat& x, const Int& den) {
  Int n = rat_num(x) * den;
  Int d = rat_den(x);
  Int q = n / d;
  if (n < 0 && n % d != 0) --q;
  return Rat(q, den);
}

Int int_sqrt(const Int& n) {
  if (n <= 0) return 0;
  return boost::multiprecision::sqrt(n);
}

std::string ext_str(const ExtRat& x) {
  return x.finite ? rat_str(x.value) : "inf";
}

std::string ext_display(const ExtRat& x, int precision) {
  return x.finite ? rat_display(x.value, precision) : "inf";
}

}  // namespace defisem
