#include "popdyn/rational.hpp"

#include <cctype>
#include <limits>
#include <ostream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "popdyn/error.hpp"

namespace popdyn {

namespace mp = boost::multiprecision;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Decimal literal: optional sign, digits, optional '.' and digits, optional exponent.
Rational::Backend parse_decimal(std::string_view s, std::string_view whole) {
  auto fail = [&] { return Error(ErrorCode::MalformedNumber, "cannot parse '" + std::string(whole) + "'"); };
  if (s.empty()) throw fail();
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  mp::cpp_int digits = 0;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  std::size_t pos = 0;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw fail();
  long exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw fail();
    ++pos;
    bool exp_negative = false;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
      exp_negative = s[pos] == '-';
      ++pos;
    }
    if (pos == s.size()) throw fail();
    for (; pos < s.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(s[pos]))) throw fail();
      exponent = exponent * 10 + (s[pos] - '0');
      if (exponent > 4000) throw fail();
    }
    if (exp_negative) exponent = -exponent;
  }
  const long scale = static_cast<long>(frac_digits) - exponent;
  mp::cpp_int pow10 = mp::pow(mp::cpp_int(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational::Backend value = scale >= 0 ? Rational::Backend(digits, pow10)
                                       : Rational::Backend(digits * pow10);
  return negative ? Rational::Backend(-value) : value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  v_ = Backend(num, den);
}

Rational Rational::parse(std::string_view text) {
  const std::string_view s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_decimal(s, text));
  const Backend num = parse_decimal(trim(s.substr(0, slash)), text);
  const Backend den = parse_decimal(trim(s.substr(slash + 1)), text);
  if (den == 0) throw Error(ErrorCode::MalformedNumber, "zero denominator in '" + std::string(text) + "'");
  return Rational(Backend(num / den));
}

std::string Rational::str() const {
  return mp::numerator(v_).str() + "/" + mp::denominator(v_).str();
}

std::string Rational::decimal(int significant_digits) const {
  if (v_ == 0) return "0";
  using Dec = mp::cpp_dec_float_50;
  const Dec value = Dec(mp::numerator(v_)) / Dec(mp::denominator(v_));
  return value.str(significant_digits);
}

double Rational::to_double() const { return v_.convert_to<double>(); }

bool Rational::is_integer() const { return mp::denominator(v_) == 1; }

int Rational::sign() const { return v_ < 0 ? -1 : (v_ > 0 ? 1 : 0); }

std::pair<std::int64_t, std::int64_t> Rational::as_i64() const {
  const mp::cpp_int num = mp::numerator(v_);
  const mp::cpp_int den = mp::denominator(v_);
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) {
    throw Error(ErrorCode::InvalidArgument, "rational " + str() + " does not fit in 64 bits");
  }
  return {num.convert_to<std::int64_t>(), den.convert_to<std::int64_t>()};
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.v_ == 0) throw Error(ErrorCode::InvalidArgument, "division by zero");
  v_ /= o.v_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace popdyn
