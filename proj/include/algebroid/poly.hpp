#ifndef ALGEBROID_POLY_HPP
#define ALGEBROID_POLY_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "algebroid/rational.hpp"

namespace algebroid {

/// Exact multivariate polynomial over the rationals in variables x1..xd.
///
/// Terms are kept in a sorted map from exponent vector to nonzero
/// coefficient, so equality is structural and printing is deterministic.
/// d = 0 is allowed; such polynomials are plain rationals.
class Poly {
public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, Rational>;

  Poly() : nvars_(0) {}
  explicit Poly(int nvars);

  static Poly constant(int nvars, const Rational& c);
  static Poly variable(int nvars, int index);  // index in 1..nvars

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero if absent).
  Rational constant_term() const;
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  const TermMap& terms() const { return terms_; }

  void add_term(const Exponents& exps, const Rational& c);

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rational& c) const;

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  bool operator<(const Poly& o) const;  // arbitrary total order, for map keys

  /// Partial derivative with respect to x_index (1-based).
  Poly partial(int index) const;

  /// Renders the polynomial in the input grammar, so parse(str()) == *this.
  std::string str() const;

private:
  void check_compatible(const Poly& o) const;

  int nvars_;
  TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const Poly& p);

/// Raised by the expression parsers; `position` is a 0-based offset into the
/// offending text.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Parses the polynomial expression grammar:
///   expr := term (('+'|'-') term)* ; term := factor ('*' factor)*
///   factor := atom ('^' natural)? ; atom := rational | var | '(' expr ')'
///   var := 'x' natural ; rational := integer ('/' positive-integer)?
/// Whitespace is insignificant; juxtaposition is not multiplication.
Poly parse_poly(const std::string& text, int nvars);

}  // namespace algebroid

#endif
