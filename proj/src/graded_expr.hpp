#ifndef ALGEBROID_SRC_GRADED_EXPR_HPP
#define ALGEBROID_SRC_GRADED_EXPR_HPP

#include <string>
#include <utility>
#include <vector>

#include "algebroid/poly.hpp"

namespace algebroid::detail {

/// One additive term of a graded expression: polynomial coefficient times a
/// sequence of basis indices in written order (callers decide whether the
/// sequence means a wedge or a product).
struct GradedTerm {
  Poly coeff;
  std::vector<int> indices;
};

/// Parses sums of terms like "x1 * e1^e2 - 1/2 * e2^e3" (prefix "e") or
/// "x1 * xi1^xi2" (prefix "xi"). Polynomial factors follow the kernel
/// grammar. When allow_power is set, e1^2 repeats the index (product
/// semantics); otherwise '^' must join two basis elements.
std::vector<GradedTerm> parse_graded_expr(const std::string& text, int nvars,
                                          const std::string& prefix, bool allow_power);

/// Splits on '|' at top parenthesis level (tensor-slot separator).
std::vector<std::string> split_tensor_slots(const std::string& text);

}  // namespace algebroid::detail

#endif
