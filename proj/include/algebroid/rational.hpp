#ifndef ALGEBROID_RATIONAL_HPP
#define ALGEBROID_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace algebroid {

/// Exact rational number. Always canonical: gcd(|num|, den) = 1, den > 0,
/// zero is 0/1.
class Rational {
public:
  Rational() : value_(0) {}
  Rational(long n) : value_(n) {}
  Rational(long num, long den) : value_(num, den) { value_.canonicalize(); }
  explicit Rational(const mpq_class& v) : value_(v) { value_.canonicalize(); }

  /// Parses "n" or "n/d". Throws std::invalid_argument on malformed input
  /// or zero denominator.
  static Rational from_string(const std::string& text);

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_one() const { return value_ == 1; }
  int sign() const { return sgn(value_); }

  std::string numerator() const { return value_.get_num().get_str(); }
  std::string denominator() const { return value_.get_den().get_str(); }

  Rational operator-() const { return Rational(mpq_class(-value_)); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.value_ != b.value_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.value_ < b.value_; }

  /// "p/q", or just "p" when the denominator is 1.
  std::string str() const;

  const mpq_class& raw() const { return value_; }

private:
  mpq_class value_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace algebroid

#endif
