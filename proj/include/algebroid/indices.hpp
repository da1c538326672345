#ifndef ALGEBROID_INDICES_HPP
#define ALGEBROID_INDICES_HPP

#include <optional>
#include <utility>
#include <vector>

namespace algebroid {

using IndexTuple = std::vector<int>;

/// Merges two strictly increasing tuples into one, returning the shuffle
/// sign, or nullopt when they share an index (the wedge vanishes).
inline std::optional<std::pair<int, IndexTuple>> wedge_merge(const IndexTuple& a,
                                                             const IndexTuple& b) {
  IndexTuple out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  long inversions = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return std::nullopt;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      inversions += static_cast<long>(a.size() - i);
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return std::make_pair(inversions % 2 == 0 ? 1 : -1, std::move(out));
}

/// Sorts an arbitrary tuple into strictly increasing order; returns the
/// permutation sign, or 0 when an index repeats.
inline int sort_tuple(IndexTuple& t) {
  int sign = 1;
  for (std::size_t i = 1; i < t.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && t[j - 1] > t[j]) {
      std::swap(t[j - 1], t[j]);
      sign = -sign;
      --j;
    }
    if (j > 0 && t[j - 1] == t[j]) return 0;
  }
  return sign;
}

/// Removes the element at `pos`, with the Koszul sign (-1)^pos of moving a
/// degree-one operator past the preceding factors.
inline std::pair<int, IndexTuple> remove_at(const IndexTuple& t, std::size_t pos) {
  IndexTuple out;
  out.reserve(t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i)
    if (i != pos) out.push_back(t[i]);
  return {pos % 2 == 0 ? 1 : -1, std::move(out)};
}

/// (-1)^e for possibly negative exponents.
inline int pow_sign(long e) { return ((e % 2) + 2) % 2 == 0 ? 1 : -1; }

/// Exponent-vector utilities for the formal fiber coordinates.
inline int total(const std::vector<int>& exps) {
  int s = 0;
  for (int e : exps) s += e;
  return s;
}

inline std::vector<int> exps_add(std::vector<int> a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

}  // namespace algebroid

#endif
