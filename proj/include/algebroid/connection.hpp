#ifndef ALGEBROID_CONNECTION_HPP
#define ALGEBROID_CONNECTION_HPP

#include <map>
#include <string>
#include <vector>

#include "algebroid/chart.hpp"
#include "algebroid/polyvector.hpp"

namespace algebroid {

/// E-tensor of type (contra, co): entries indexed by a tuple holding the
/// contravariant indices first, then the covariant ones, all in 1..r.
class ETensor {
public:
  ETensor() = default;
  ETensor(ChartPtr chart, int contra, int co);

  const ChartPtr& chart() const { return chart_; }
  int contra() const { return contra_; }
  int co() const { return co_; }
  bool is_zero() const { return entries_.empty(); }
  const std::map<IndexTuple, Poly>& entries() const { return entries_; }

  Poly at(const IndexTuple& indices) const;
  void set(const IndexTuple& indices, const Poly& value);
  void add(const IndexTuple& indices, const Poly& value);

  ETensor operator-() const;
  ETensor& operator+=(const ETensor& o);
  ETensor& operator-=(const ETensor& o);
  friend ETensor operator+(ETensor a, const ETensor& b) { return a += b; }
  friend ETensor operator-(ETensor a, const ETensor& b) { return a -= b; }

  bool operator==(const ETensor& o) const {
    return contra_ == o.contra_ && co_ == o.co_ && entries_ == o.entries_;
  }

private:
  ChartPtr chart_;
  int contra_ = 0, co_ = 0;
  std::map<IndexTuple, Poly> entries_;
};

/// Linear E-connection given by Christoffel symbols, nabla_{e_i} e_j =
/// Gamma_{ij}^k e_k. No symmetry is assumed; torsion-freeness is checkable.
class Connection {
public:
  explicit Connection(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  const Poly& gamma(int i, int j, int k) const;
  void set_gamma(int i, int j, int k, const Poly& value);

private:
  ChartPtr chart_;
  std::vector<Poly> gamma_;  // (i, j, k) row-major, 1-based externally
};

/// The canonical torsion-free connection Gamma_{ij}^k = 1/2 c_{ij}^k.
Connection canonical_torsion_free(const ChartPtr& chart);

/// Torsion (1,2)-tensor, entries (k; i, j):
///   T_{ij}^k = Gamma_{ij}^k - Gamma_{ji}^k - c_{ij}^k.
ETensor torsion(const Connection& conn);

/// Curvature (1,3)-tensor, entries (l; i, j, k):
///   R_{ijk}^l = Gamma_{im}^l Gamma_{jk}^m - Gamma_{ik}^m Gamma_{jm}^l
///             + rho(e_i).Gamma_{jk}^l - rho(e_j).Gamma_{ik}^l
///             - c_{ij}^m Gamma_{mk}^l.
ETensor curvature(const Connection& conn);

bool is_torsion_free(const Connection& conn);

/// Covariant derivative along e_i: acts as rho(e_i) on coefficients, +Gamma
/// on contravariant slots, -Gamma on covariant slots.
ETensor covariant_derivative(int direction, const ETensor& tensor, const Connection& conn);

/// Covariant derivative along a degree-0 polyvector (C-infinity-linear in
/// the direction).
ETensor covariant_derivative(const PolyVector& direction, const ETensor& tensor,
                             const Connection& conn);

struct IdentityViolation {
  std::string identity;
  Poly residual;
};

/// Checks both Bianchi identities on all generator triples; empty iff both
/// hold. They are theorems for any connection, so a nonempty report flags
/// an implementation bug rather than bad input.
std::vector<IdentityViolation> bianchi_check(const Connection& conn);

}  // namespace algebroid

#endif
