#include "algebroid/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace algebroid {

std::vector<std::size_t> QMatrix::row_echelon() {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t pivot = row;
    while (pivot < rows_ && at(pivot, col).is_zero()) ++pivot;
    if (pivot == rows_) continue;
    if (pivot != row)
      for (std::size_t j = col; j < cols_; ++j) std::swap(at(row, j), at(pivot, j));
    Rational inv = Rational(1) / at(row, col);
    for (std::size_t j = col; j < cols_; ++j) at(row, j) *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row || at(i, col).is_zero()) continue;
      Rational f = at(i, col);
      for (std::size_t j = col; j < cols_; ++j) at(i, j) -= at(row, j) * f;
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t QMatrix::rank() const {
  QMatrix copy = *this;
  return copy.row_echelon().size();
}

std::optional<std::vector<Rational>> solve_linear(QMatrix a, std::vector<Rational> b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve_linear: size mismatch");
  QMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  std::vector<std::size_t> pivots = aug.row_echelon();
  for (std::size_t p : pivots)
    if (p == a.cols()) return std::nullopt;  // pivot in the rhs column
  std::vector<Rational> x(a.cols(), Rational(0));
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(r, a.cols());
  return x;
}

}  // namespace algebroid
