#ifndef ALGEBROID_QUANTIZATION_HPP
#define ALGEBROID_QUANTIZATION_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "algebroid/connection.hpp"
#include "algebroid/enveloping.hpp"
#include "algebroid/polyvector.hpp"

namespace algebroid {

/// Bivector Lambda = sum_{i<j} Lambda^{ij} e_i ^ e_j; quantization input
/// once [Lambda, Lambda]_E = 0.
class Bivector {
public:
  explicit Bivector(ChartPtr chart) : chart_(std::move(chart)) {}

  const ChartPtr& chart() const { return chart_; }
  void set(int i, int j, const Poly& value);
  Poly at(int i, int j) const;  // antisymmetric accessor
  const std::map<std::pair<int, int>, Poly>& entries() const { return entries_; }

  PolyVector as_polyvector() const;
  static Bivector from_polyvector(const PolyVector& v);

private:
  ChartPtr chart_;
  std::map<std::pair<int, int>, Poly> entries_;  // keys i < j
};

/// Truncated hbar-series with explicit order (index = power of hbar).
template <typename T>
struct HbarSeries {
  std::vector<T> coeffs;
  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

using PolySeries = HbarSeries<Poly>;
using OpSeries = HbarSeries<PolyDiffOp>;
using UESeries = HbarSeries<UEElement>;

class QuantizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when the order-by-order solver finds no solution within the
/// operator-order bound; retry with a larger bound.
class InconsistentAtBound : public QuantizationError {
public:
  InconsistentAtBound(int order, int bound)
      : QuantizationError("twistor extension inconsistent at order " + std::to_string(order) +
                          " with operator-order bound " + std::to_string(bound)),
        order_(order),
        bound_(bound) {}
  int order() const { return order_; }
  int bound() const { return bound_; }

private:
  int order_, bound_;
};

/// J = m0 + hbar J_1 + ... + hbar^n J_n with arity-1 coefficients, counit
/// normalized ((eps (x) id)(J_m) = (id (x) eps)(J_m) = 0 for m >= 1).
class FormalTwistor {
public:
  FormalTwistor(ChartPtr chart, std::vector<PolyDiffOp> coeffs);

  const ChartPtr& chart() const { return chart_; }
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const PolyDiffOp& at(int m) const { return coeffs_.at(m); }
  const std::vector<PolyDiffOp>& coeffs() const { return coeffs_; }

private:
  ChartPtr chart_;
  std::vector<PolyDiffOp> coeffs_;
};

/// Exact Schouten self-bracket; empty report iff [Lambda, Lambda] = 0.
std::vector<IdentityViolation> maurer_cartan_check(const Bivector& lambda);

/// J = m0 + hbar hkr(Lambda). Throws QuantizationError if the
/// Maurer-Cartan check fails.
FormalTwistor twistor_order1(const Bivector& lambda);

/// Order-hbar^m coefficient of J^{12,3} J^{1,2} - J^{1,23} J^{2,3}
/// (arity 2); zero through the twistor's order iff J solves the cocycle
/// equation to that order.
PolyDiffOp cocycle_residual(const FormalTwistor& j, int m);

/// The same residual computed through the DGLA route, as the order-m
/// coefficient of d(J - m0) + 1/2 [J - m0, J - m0]; agrees with
/// cocycle_residual term by term.
PolyDiffOp maurer_cartan_residual(const FormalTwistor& j, int m);

/// Solves the order-(n+1) linearization d J_{n+1} = -K_n inside the span
/// of tuples with both slots nonempty, per-slot monomial length <= bound
/// (the operator order per argument), and coefficient degree <= xdeg_bound
/// (chosen from the residual when negative). Free directions are pinned to
/// zero, so the result is deterministic.
FormalTwistor twistor_extend(const FormalTwistor& j, int bound, int xdeg_bound = -1);

/// a *_J b order by order through the extended anchor action.
PolySeries twisted_product(const Poly& a, const Poly& b, const FormalTwistor& j);

/// Star product of truncated series (used by the associativity checks).
PolySeries star(const PolySeries& a, const PolySeries& b, const FormalTwistor& j);

/// The twisted Hopf algebroid data: J, its series inverse, and the twisted
/// coproduct / source / target maps mod hbar^{order+1}.
class TwistedHopf {
public:
  TwistedHopf(FormalTwistor j, std::vector<PolyDiffOp> j_inverse);

  const FormalTwistor& twistor() const { return j_; }
  const std::vector<PolyDiffOp>& inverse() const { return jinv_; }
  int order() const { return j_.order(); }

  OpSeries twisted_coproduct(const UEElement& h) const;
  UESeries twisted_source(const Poly& a) const;
  UESeries twisted_target(const Poly& a) const;

private:
  FormalTwistor j_;
  std::vector<PolyDiffOp> jinv_;
};

/// Builds the twisted structure; refuses (QuantizationError) when a cocycle
/// residual is nonzero through the twistor's order.
TwistedHopf twisted_hopf(const FormalTwistor& j);

/// Checks the Hopf algebroid axioms of the twisted structure modulo
/// hbar^{order+1} on the generators and the given sample functions:
/// coassociativity, the ideal condition (as placement-independence),
/// multiplicativity, counit identities, and the anchor compatibility
/// equations.
std::vector<IdentityViolation> twisted_hopf_axiom_check(const TwistedHopf& hopf,
                                                        const std::vector<Poly>& samples);

/// Verifies the order-hbar antisymmetric part of J equals Lambda under
/// e_i ^ e_j <-> e_i (x) e_j - e_j (x) e_i.
std::vector<IdentityViolation> semiclassical_check(const FormalTwistor& j,
                                                   const Bivector& lambda);

/// Parses `lambda <i> <j> = <poly>` entries collected from a chart file.
Bivector bivector_from_entries(const ChartPtr& chart,
                               const std::map<std::array<int, 2>, Poly>& entries);

/// Parses the polyvector syntax restricted to degree 1, e.g. "x1*e1^e2".
Bivector parse_bivector(const std::string& text, const ChartPtr& chart);

}  // namespace algebroid

#endif
