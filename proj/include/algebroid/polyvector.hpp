#ifndef ALGEBROID_POLYVECTOR_HPP
#define ALGEBROID_POLYVECTOR_HPP

#include <iosfwd>
#include <map>
#include <string>

#include "algebroid/chart.hpp"

namespace algebroid {

/// E-polyvector field: sum over strictly increasing generator tuples with
/// polynomial coefficients. A tuple of length k+1 lives in degree k; the
/// empty tuple is the degree -1 (function) part.
class PolyVector {
public:
  PolyVector() = default;
  explicit PolyVector(ChartPtr chart) : chart_(std::move(chart)) {}
  PolyVector(ChartPtr chart, const Poly& function);

  static PolyVector generator(ChartPtr chart, int i);

  const ChartPtr& chart() const { return chart_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<IndexTuple, Poly>& terms() const { return terms_; }

  void add_term(IndexTuple tuple, const Poly& coeff);

  /// Terms of degree k (tuple length k+1).
  PolyVector component(int k) const;
  int top_degree() const;  // -2 when zero
  bool is_homogeneous(int k) const;

  PolyVector operator-() const;
  PolyVector& operator+=(const PolyVector& o);
  PolyVector& operator-=(const PolyVector& o);
  friend PolyVector operator+(PolyVector a, const PolyVector& b) { return a += b; }
  friend PolyVector operator-(PolyVector a, const PolyVector& b) { return a -= b; }
  PolyVector operator*(const Rational& c) const;
  PolyVector operator*(const Poly& f) const;

  bool operator==(const PolyVector& o) const { return terms_ == o.terms_; }
  bool operator!=(const PolyVector& o) const { return !(*this == o); }

  std::string str() const;

private:
  ChartPtr chart_;
  std::map<IndexTuple, Poly> terms_;
};

std::ostream& operator<<(std::ostream& os, const PolyVector& v);

/// Exterior product; graded commutative and associative.
PolyVector wedge(const PolyVector& u, const PolyVector& v);

/// The degree-zero Lie super-bracket on T_poly E extending [.,.]_E:
/// [e_i, e_j] = c_{ij}^k e_k, [v, f] = rho(v).f, and
/// [u, v ^ w] = [u, v] ^ w + (-1)^{k_u (k_v + 1)} v ^ [u, w].
PolyVector schouten_bracket(const PolyVector& u, const PolyVector& v);

/// Parses the CLI syntax, e.g. "x1 * e1^e2 - 1/2 * e2^e3".
PolyVector parse_polyvector(const std::string& text, const ChartPtr& chart);

}  // namespace algebroid

#endif
