#ifndef ALGEBROID_ENVELOPING_HPP
#define ALGEBROID_ENVELOPING_HPP

#include <map>
#include <string>
#include <vector>

#include "algebroid/chart.hpp"
#include "algebroid/polyvector.hpp"

namespace algebroid {

/// PBW monomial: non-decreasing sequence of generator indices. The empty
/// monomial is the unit.
using PBWMonomial = std::vector<int>;

/// Element of the enveloping algebra UE in PBW normal form: a free left
/// module over the polynomial ring on normal-ordered monomials.
class UEElement {
public:
  UEElement() = default;
  explicit UEElement(ChartPtr chart) : chart_(std::move(chart)) {}
  UEElement(ChartPtr chart, const Poly& scalar);

  static UEElement one(ChartPtr chart);
  static UEElement generator(ChartPtr chart, int i);

  const ChartPtr& chart() const { return chart_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<PBWMonomial, Poly>& terms() const { return terms_; }

  /// Adds coeff * monomial; the monomial must already be normal ordered.
  void add_term(const PBWMonomial& monomial, const Poly& coeff);

  /// Max monomial length (PBW filtration order); -1 when zero.
  int order() const;

  UEElement operator-() const;
  UEElement& operator+=(const UEElement& o);
  UEElement& operator-=(const UEElement& o);
  friend UEElement operator+(UEElement a, const UEElement& b) { return a += b; }
  friend UEElement operator-(UEElement a, const UEElement& b) { return a -= b; }
  UEElement operator*(const Rational& c) const;
  UEElement operator*(const Poly& f) const;  // left multiplication by a function

  bool operator==(const UEElement& o) const { return terms_ == o.terms_; }
  bool operator!=(const UEElement& o) const { return !(*this == o); }

  std::string str() const;

private:
  ChartPtr chart_;
  std::map<PBWMonomial, Poly> terms_;
};

/// Associative product with PBW normal ordering: e_j e_i -> e_i e_j +
/// c_{ji}^k e_k for j > i, and e_i f -> f e_i + rho(e_i).f.
UEElement ue_mul(const UEElement& a, const UEElement& b);

/// Counit: the coefficient of the empty monomial.
Poly counit(const UEElement& a);

/// The extended anchor UE -> End(Poly): monomials act by composing the
/// generator vector fields, rho(u v) = rho(u) rho(v).
Poly ue_action(const UEElement& u, const Poly& f);

/// E-polydifferential operator of arity k >= -1: an element of the
/// (k+1)-fold tensor product of UE over the base functions, kept canonical
/// with a single left coefficient per tuple of PBW monomials. Arity -1
/// holds a plain function (empty tuple).
class PolyDiffOp {
public:
  PolyDiffOp() = default;
  PolyDiffOp(ChartPtr chart, int arity);

  static PolyDiffOp from_function(ChartPtr chart, const Poly& f);
  static PolyDiffOp from_ue(const UEElement& u);
  /// Canonicalizes u_0 (x) ... (x) u_k, pulling coefficients left through
  /// the tensor relation u (x) f v = u f (x) v, rightmost slot first.
  static PolyDiffOp tensor(ChartPtr chart, const std::vector<UEElement>& slots);
  /// m0 = 1 (x) 1, the arity-1 unit cocycle.
  static PolyDiffOp m0(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  int arity() const { return arity_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<std::vector<PBWMonomial>, Poly>& terms() const { return terms_; }

  /// Adds coeff * (M_0 (x) ... (x) M_k); monomials must be normal ordered.
  void add_term(const std::vector<PBWMonomial>& monomials, const Poly& coeff);

  /// Max total monomial length (filtration order); -1 when zero.
  int order() const;

  PolyDiffOp operator-() const;
  PolyDiffOp& operator+=(const PolyDiffOp& o);
  PolyDiffOp& operator-=(const PolyDiffOp& o);
  friend PolyDiffOp operator+(PolyDiffOp a, const PolyDiffOp& b) { return a += b; }
  friend PolyDiffOp operator-(PolyDiffOp a, const PolyDiffOp& b) { return a -= b; }
  PolyDiffOp operator*(const Rational& c) const;
  PolyDiffOp operator*(const Poly& f) const;  // left-coefficient multiplication

  bool operator==(const PolyDiffOp& o) const {
    return arity_ == o.arity_ && terms_ == o.terms_;
  }
  bool operator!=(const PolyDiffOp& o) const { return !(*this == o); }

  std::string str() const;

private:
  ChartPtr chart_;
  int arity_ = -1;
  std::map<std::vector<PBWMonomial>, Poly> terms_;
};

/// Coproduct Delta(v) = v (x) 1 + 1 (x) v on generators, extended
/// multiplicatively; on PBW monomials this is the shuffle splitting.
PolyDiffOp coproduct(const UEElement& a);

/// Applies Delta to one tensor slot of P (arity k -> k+1).
PolyDiffOp coproduct_slot(const PolyDiffOp& p, int slot);

/// Applies the counit to one tensor slot (arity k -> k-1).
PolyDiffOp counit_slot(const PolyDiffOp& p, int slot);

/// Swaps the two slots of an arity-1 operator (with recanonicalization).
PolyDiffOp flip12(const PolyDiffOp& p);

/// Slotwise product of two operators of equal arity (the partial algebra
/// structure used by the coproduct axioms and the twistor equation),
/// computed on canonical representatives and recanonicalized. The right
/// factor's coefficient multiplies into slot 0.
PolyDiffOp diffop_mul(const PolyDiffOp& a, const PolyDiffOp& b);

/// Same product with the right factor's coefficient placed into the given
/// slot instead. Placements agree exactly when the left factor satisfies
/// the coproduct ideal condition; comparing them is that condition's
/// computational content.
PolyDiffOp diffop_mul_at(const PolyDiffOp& a, const PolyDiffOp& b, int coeff_slot);

/// Gerstenhaber composition
///   P1 . P2 = sum_i (-1)^{i k2} (id^i (x) Delta^{(k2+1)} (x) id^{k1-i})(P1)
///             * (1^i (x) P2 (x) 1^{k1-i})
/// with Delta^{(1)} = id, Delta^{(n+1)} = (Delta (x) id^{n-1}) Delta^{(n)},
/// and Delta^{(0)} realized as slot-content counit against the arity -1
/// operand.
PolyDiffOp bullet(const PolyDiffOp& p1, const PolyDiffOp& p2);

/// [P1, P2] = P1 . P2 - (-1)^{k1 k2} P2 . P1.
PolyDiffOp gerstenhaber_bracket(const PolyDiffOp& p1, const PolyDiffOp& p2);

/// Hochschild differential [m0, .]; squares to zero.
PolyDiffOp hochschild_d(const PolyDiffOp& p);

/// The antisymmetrization quasi-isomorphism on a homogeneous polyvector:
///   hkr(v_0 ^ ... ^ v_n) = 1/(n+1)! sum_sigma eps(sigma)
///                          v_{sigma_0} (x) ... (x) v_{sigma_n}.
PolyDiffOp hkr(const PolyVector& v);

/// One arity slot of the truncated cohomology report.
struct CohomologyWindow {
  int arity = 0;
  std::size_t dim = 0;        // basis size of the filtration window
  std::size_t ker = 0;        // dim ker(d) on the window
  std::size_t im = 0;         // dim im(d) arriving from arity-1
  long detected = 0;          // ker - im
  long wedge_dim = 0;         // dim Wedge^{k+1} R^r for comparison
  bool hkr_spans = false;     // hkr classes are independent and fill ker/im
};

/// Exact ranks of the Hochschild windows over a point (d = 0), arities
/// -1..max_arity, PBW filtration order <= max_order. Throws
/// std::invalid_argument for d > 0 and std::length_error past the cap.
std::vector<CohomologyWindow> truncated_cohomology(const ChartPtr& chart, int max_arity,
                                                   int max_order,
                                                   std::size_t dimension_cap = 20000);

/// Parses UE elements like "e1*e2 + x1*e3" (powers allowed: e1^2 = e1*e1).
UEElement parse_ue(const std::string& text, const ChartPtr& chart);

/// Parses tensors with '|' slot separators, e.g. "e1|e2 - e2|e1".
PolyDiffOp parse_polydiffop(const std::string& text, const ChartPtr& chart);

}  // namespace algebroid

#endif
