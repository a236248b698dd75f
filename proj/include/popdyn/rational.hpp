#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace popdyn {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Backed by an arbitrary-precision rational so that invariant-measure
/// elimination and long partial sums never overflow. Hot loops work on
/// int64 images obtained through as_i64().
class Rational {
 public:
  using Backend = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(std::int64_t value) : v_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(Backend v) : v_(std::move(v)) {}

  /// Parses "0.885", "-3", "12/30", " 7 / 8 ". Decimal digits are taken
  /// literally: k fractional digits give denominator 10^k before reduction.
  static Rational parse(std::string_view text);

  /// "num/den", always with an explicit denominator.
  std::string str() const;
  /// Decimal rendering with the given number of significant digits.
  std::string decimal(int significant_digits = 12) const;

  double to_double() const;
  bool is_integer() const;
  int sign() const;

  /// Numerator and denominator as int64; throws InvalidArgument when either
  /// does not fit.
  std::pair<std::int64_t, std::int64_t> as_i64() const;
  std::int64_t numerator_i64() const { return as_i64().first; }
  std::int64_t denominator_i64() const { return as_i64().second; }

  const Backend& backend() const { return v_; }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(Backend(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  Backend v_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational abs(const Rational& r);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

}  // namespace popdyn
