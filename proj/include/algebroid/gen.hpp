#ifndef ALGEBROID_GEN_HPP
#define ALGEBROID_GEN_HPP

#include <cstdint>
#include <random>

#include "algebroid/chart.hpp"
#include "algebroid/fedosov.hpp"
#include "algebroid/polyvector.hpp"

namespace algebroid {

/// Seeded generator of small random algebra elements, shared by the
/// property-test suites and the CLI verification commands so failures
/// reproduce from a reported seed.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi);
  Rational rational(int max_abs = 4);          // possibly zero or negative
  Rational nonzero_rational(int max_abs = 4);
  Poly poly(int nvars, int max_degree = 2, int terms = 3);

  EForm eform(const ChartPtr& chart, int degree, int terms = 2);
  PolyVector polyvector(const ChartPtr& chart, int degree, int terms = 2);

  /// Random mixed section with the given form degree, fiber degree, and
  /// payload arity (payload_arity is ignored for kind W).
  MixedSection section(const ChartPtr& chart, BundleKind kind, int truncation, int form_degree,
                       int fiber_degree, int payload_arity, int terms = 2);

  std::mt19937_64& rng() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace algebroid

#endif
