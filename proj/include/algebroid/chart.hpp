#ifndef ALGEBROID_CHART_HPP
#define ALGEBROID_CHART_HPP

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "algebroid/indices.hpp"
#include "algebroid/poly.hpp"

namespace algebroid {

/// A local Lie algebroid presentation: base dimension d, rank r, polynomial
/// anchor matrix rho (rho(e_i) = sum_a rho_{ia} d/dx_a) and structure
/// functions c_{ij}^k with [e_i, e_j] = c_{ij}^k e_k.
///
/// Only i < j entries of c are stored; c_{ji}^k = -c_{ij}^k and c_{ii}^k = 0
/// hold by construction. Validity (anchor morphism + Jacobi) is a separate
/// check, see validate_chart.
class Chart {
public:
  Chart(int base_dim, int rank);

  int base_dim() const { return base_dim_; }
  int rank() const { return rank_; }

  void set_anchor(int i, int a, const Poly& value);           // 1 <= i <= r, 1 <= a <= d
  void set_structure(int i, int j, int k, const Poly& value); // requires i < j

  const Poly& anchor(int i, int a) const;
  /// Signed accessor: antisymmetry in (i, j) is applied on read.
  Poly structure(int i, int j, int k) const;

  /// The action rho(e_i).f = sum_a rho_{ia} df/dx_a.
  Poly anchor_apply(int i, const Poly& f) const;

  /// Stored structure entries, keys (i, j, k) with i < j.
  const std::map<std::array<int, 3>, Poly>& structure_terms() const { return structure_; }

  Poly zero() const { return Poly(base_dim_); }
  Poly one() const { return Poly::constant(base_dim_, Rational(1)); }

  bool operator==(const Chart& o) const;

private:
  int base_dim_, rank_;
  std::vector<Poly> anchor_;                  // r*d, row-major
  std::map<std::array<int, 3>, Poly> structure_;  // key (i,j,k), i < j
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Throws std::invalid_argument unless both values live on the same chart.
void require_same_chart(const ChartPtr& a, const ChartPtr& b);

/// One violated identity: which equation failed and the nonzero residual.
struct ChartViolation {
  std::string identity;
  Poly residual;
};

/// Checks the Lie algebroid axioms as exact polynomial identities: the
/// anchor is a bracket morphism on generators, and the Jacobi identity
/// (including anchor derivatives of the structure functions) holds on all
/// generator triples. Empty result iff the chart is valid.
std::vector<ChartViolation> validate_chart(const Chart& chart);

/// E-differential form, stored as strictly increasing xi-index tuples with
/// polynomial coefficients. The empty tuple holds the degree-0 part.
class EForm {
public:
  EForm() = default;
  explicit EForm(ChartPtr chart) : chart_(std::move(chart)) {}
  EForm(ChartPtr chart, const Poly& function);

  const ChartPtr& chart() const { return chart_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<IndexTuple, Poly>& terms() const { return terms_; }

  /// Adds coeff * xi^{tuple}; the tuple is sorted (with sign) on insertion.
  void add_term(IndexTuple tuple, const Poly& coeff);

  int max_degree() const;

  EForm operator-() const;
  EForm& operator+=(const EForm& o);
  EForm& operator-=(const EForm& o);
  friend EForm operator+(EForm a, const EForm& b) { return a += b; }
  friend EForm operator-(EForm a, const EForm& b) { return a -= b; }
  EForm operator*(const Rational& c) const;

  EForm wedge(const EForm& o) const;

  bool operator==(const EForm& o) const { return terms_ == o.terms_; }
  bool operator!=(const EForm& o) const { return !(*this == o); }

  std::string str() const;

private:
  ChartPtr chart_;
  std::map<IndexTuple, Poly> terms_;
};

std::ostream& operator<<(std::ostream& os, const EForm& w);

/// The E-de Rham differential
///   d_E = xi^i rho(e_i) - 1/2 xi^i ^ xi^j c_{ij}^k d/dxi^k.
/// Raises form degree by one; d_E^2 = 0 exactly iff the chart is valid.
EForm d_E(const EForm& form);

/// Parses the CLI syntax for forms, e.g. "x1 * xi1^xi2 - 1/2 * xi2^xi3".
EForm parse_eform(const std::string& text, const ChartPtr& chart);

/// Builtin example charts. Accepted names: tangent(d), abelian(r), so3,
/// sl2, heisenberg, foliation2in3, poisson_cotangent(d; <bivector>) where
/// the bivector is written in the base frame, e.g. "x1*e1^e2". The forms
/// "tangent2"/"abelian2" are accepted shorthand. Every returned chart
/// passes validate_chart; poisson_cotangent throws ChartError with the
/// violation report attached when the bivector is not Poisson.
ChartPtr builtin_chart(const std::string& name);

/// Names accepted by builtin_chart (parametrized ones in canonical form).
std::vector<std::string> builtin_chart_names();

class ChartError : public std::runtime_error {
public:
  ChartError(const std::string& message, std::vector<ChartViolation> report = {})
      : std::runtime_error(message), report_(std::move(report)) {}
  const std::vector<ChartViolation>& report() const { return report_; }

private:
  std::vector<ChartViolation> report_;
};

/// Line-oriented chart file: `chart d=<int> r=<int>` header, then
/// `rho <i> <a> = <poly>` and `c <i> <j> <k> = <poly>` lines (i < j),
/// optionally `gamma <i> <j> <k> = <poly>` (connection) and
/// `lambda <i> <j> = <poly>` (bivector) lines picked up by other modules.
/// `#` starts a comment.
struct ChartFile {
  ChartPtr chart;
  std::map<std::array<int, 3>, Poly> gamma;
  std::map<std::array<int, 2>, Poly> lambda;
};

ChartFile parse_chart_file(std::istream& in, const std::string& filename = "<input>");
ChartFile load_chart_file(const std::string& path);

/// Renders a chart in the file format (round-trips through parse_chart_file).
std::string write_chart_file(const Chart& chart);

}  // namespace algebroid

#endif
