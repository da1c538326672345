#ifndef ALGEBROID_LINALG_HPP
#define ALGEBROID_LINALG_HPP

#include <optional>
#include <vector>

#include "algebroid/rational.hpp"

namespace algebroid {

/// Dense matrix over the rationals, just big enough for exact rank and
/// linear-system computations on desk-scale complexes.
class QMatrix {
public:
  QMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// Gaussian elimination in place; returns the pivot column of each pivot
  /// row (row echelon, not reduced). Columns are eliminated left to right,
  /// so the pivot choice is deterministic.
  std::vector<std::size_t> row_echelon();

  std::size_t rank() const;

private:
  std::size_t rows_, cols_;
  std::vector<Rational> data_;
};

/// Solves A x = b exactly. Returns the canonical solution with all free
/// variables set to zero, or nullopt when the system is inconsistent.
std::optional<std::vector<Rational>> solve_linear(QMatrix a, std::vector<Rational> b);

}  // namespace algebroid

#endif
