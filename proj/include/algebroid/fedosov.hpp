#ifndef ALGEBROID_FEDOSOV_HPP
#define ALGEBROID_FEDOSOV_HPP

#include <map>
#include <string>
#include <vector>

#include "algebroid/connection.hpp"
#include "algebroid/enveloping.hpp"
#include "algebroid/polyvector.hpp"

namespace algebroid {

/// Which formal fiber bundle a mixed section takes values in: functions on
/// the fibers (W), fiberwise polyvector fields (T), or fiberwise
/// polydifferential operators (D).
enum class BundleKind { W, T, D };

/// Term index of a mixed E-form with values in W/T/D: form part xi
/// (strictly increasing), fiber exponents y (length r), and the payload --
/// a strictly increasing d/dy index tuple for T, a list of y-multi-indices
/// for D, nothing for W.
struct SectionKey {
  IndexTuple xi;
  std::vector<int> y;
  IndexTuple tpayload;
  std::vector<std::vector<int>> dpayload;

  bool operator==(const SectionKey&) const = default;
  bool operator<(const SectionKey& o) const {
    if (xi != o.xi) return xi < o.xi;
    if (y != o.y) return y < o.y;
    if (tpayload != o.tpayload) return tpayload < o.tpayload;
    return dpayload < o.dpayload;
  }
};

/// Element of the resolution complex: an E-form with values in the formal
/// bundle, truncated at fiber degree N. Terms beyond the truncation are
/// dropped on insertion; identities are asserted only inside the reliable
/// degree the operators preserve.
class MixedSection {
public:
  MixedSection() = default;
  MixedSection(ChartPtr chart, BundleKind kind, int truncation);

  const ChartPtr& chart() const { return chart_; }
  BundleKind kind() const { return kind_; }
  int truncation() const { return truncation_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<SectionKey, Poly>& terms() const { return terms_; }

  /// Adds a term, normalizing the xi and T-payload tuples with the wedge
  /// sign and dropping anything above the fiber truncation.
  void add_term(SectionKey key, const Poly& coeff);

  MixedSection operator-() const;
  MixedSection& operator+=(const MixedSection& o);
  MixedSection& operator-=(const MixedSection& o);
  friend MixedSection operator+(MixedSection a, const MixedSection& b) { return a += b; }
  friend MixedSection operator-(MixedSection a, const MixedSection& b) { return a -= b; }
  MixedSection operator*(const Rational& c) const;
  MixedSection operator*(const Poly& f) const;

  bool operator==(const MixedSection& o) const { return terms_ == o.terms_; }
  bool operator!=(const MixedSection& o) const { return !(*this == o); }

  /// Terms of exact fiber degree m / of fiber degree <= m.
  MixedSection y_component(int m) const;
  MixedSection truncate_y(int max_degree) const;
  int max_y_degree() const;  // -1 when zero

  std::string str() const;

private:
  ChartPtr chart_;
  BundleKind kind_ = BundleKind::W;
  int truncation_ = 0;
  std::map<SectionKey, Poly> terms_;
};

/// delta = xi^i d/dy^i (payload untouched; lowers fiber degree, raises form
/// degree).
MixedSection delta(const MixedSection& s);
/// delta* = y^i iota(e_i), the contraction against the Euler vector field.
MixedSection delta_star(const MixedSection& s);
/// kappa = delta*/(k+l) on (k,l)-bihomogeneous terms with k+l > 0, else 0.
MixedSection kappa(const MixedSection& s);
/// Harmonic part: the y = xi = 0 piece (payload kept).
MixedSection harmonic(const MixedSection& s);

/// Fiberwise supercommutative product of two W-sections.
MixedSection w_mul(const MixedSection& a, const MixedSection& b);

/// Fiberwise Schouten-Nijenhuis bracket on T-sections, with the Koszul sign
/// (-1)^{payload(a) * formdeg(b)} for moving payloads past forms.
MixedSection fiberwise_schouten(const MixedSection& a, const MixedSection& b);

/// Fiberwise operator-composition product and Gerstenhaber bracket on
/// D-sections.
MixedSection fiberwise_bullet(const MixedSection& a, const MixedSection& b);
MixedSection fiberwise_gerstenhaber(const MixedSection& a, const MixedSection& b);

/// The fiberwise multiplication operator m (arity 1, both slots order 0).
MixedSection fiber_multiplication(const ChartPtr& chart, int truncation);

/// The covariant derivative nabla = d_E + Gamma-action on each bundle kind.
MixedSection nabla(const MixedSection& s, const Connection& conn);

/// R = -1/2 xi^i ^ xi^j R_{ijk}^l y^k d/dy^l as a T-section (form degree 2,
/// fiber degree 1), built from the Eq.-(12) curvature tensor.
MixedSection curvature_section(const Connection& conn, int truncation);

/// The graded action of a T^0-valued form (like A or Gamma) on a section of
/// any kind: derivation on W, bracket on T and D.
MixedSection t0_action(const MixedSection& field, const MixedSection& s);

/// Output of the recursive flattening solve.
struct FlatStructure {
  ChartPtr chart;
  Connection conn;
  int truncation;
  MixedSection A;  // kind T, form degree 1, fiber degrees 2..N
};

/// Solves A = kappa R + kappa(nabla A + 1/2 [A, A]) by ascending fiber
/// degree. Requires a torsion-free connection and N >= 2.
FlatStructure solve_A(const ChartPtr& chart, const Connection& conn, int truncation);

/// D = nabla - delta + [A, .].
MixedSection flat_D(const FlatStructure& fs, const MixedSection& s);

/// The fiber degree up to which D^2 output on kind `kind` is exact given
/// the truncated A (one degree lower for payload-bearing kinds, whose
/// payloads can differentiate the missing high-degree part of A).
int reliable_degree(const FlatStructure& fs, BundleKind kind);

/// D(D(s)) clipped at the reliable degree; zero for a correct A.
MixedSection d_squared_residual(const FlatStructure& fs, const MixedSection& s);

/// delta A - R - nabla A - 1/2 [A, A], clipped at fiber degree N-1.
MixedSection flatness_residual(const FlatStructure& fs);

/// The lift u = u0 + kappa(nabla u + [A, u]) of a fiber-constant input
/// (form degree 0, fiber degree 0); H(theta_lift(u0)) = u0 and
/// D(theta_lift(u0)) = 0 within the truncation.
MixedSection theta_lift(const FlatStructure& fs, const MixedSection& u0);

/// Embeddings of the fiber-constant data and the harmonic projections back.
MixedSection w_section(const ChartPtr& chart, int truncation, const Poly& f);
MixedSection t_section(const PolyVector& v, int truncation);
PolyVector harmonic_polyvector(const MixedSection& s);

/// tau_k from the recursion tau_0 = 1,
/// tau_{k+1} = y^i e_i tau_k - y^i y^j Gamma_{ij}^l dtau_k/dy^l,
/// represented as a y-polynomial with UE coefficients.
using YPolyUE = std::map<std::vector<int>, UEElement>;
YPolyUE tau(int k, const Connection& conn);

/// mu(d^alpha) = 1/|alpha|! (H (x) id)(d^alpha . tau_{|alpha|}).
UEElement mu_single(const Connection& conn, const std::vector<int>& alpha);

/// Slotwise extension of mu to fiber-constant operator sections.
PolyDiffOp mu_map(const MixedSection& constant_op, const Connection& conn);

/// H([theta u0, theta v0]_S) = [u0, v0]_E for the given inputs.
std::vector<IdentityViolation> bracket_transfer_check(const PolyVector& u0, const PolyVector& v0,
                                                      const FlatStructure& fs);

/// The four product-transfer cases of the PBW comparison (vector.vector,
/// vector.function, function.vector, function.function) plus
/// mu o Delta = Delta o mu on the symmetric part, on generators and sample
/// functions.
std::vector<IdentityViolation> mu_transfer_check(const FlatStructure& fs);

}  // namespace algebroid

#endif
