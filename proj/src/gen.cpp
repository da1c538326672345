#include "algebroid/gen.hpp"

#include <algorithm>

namespace algebroid {

int Gen::uniform(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

Rational Gen::rational(int max_abs) {
  int num = uniform(-max_abs, max_abs);
  int den = uniform(1, 3);
  return Rational(num, den);
}

Rational Gen::nonzero_rational(int max_abs) {
  Rational r = rational(max_abs);
  while (r.is_zero()) r = rational(max_abs);
  return r;
}

Poly Gen::poly(int nvars, int max_degree, int terms) {
  Poly p(nvars);
  for (int t = 0; t < terms; ++t) {
    Poly::Exponents e(nvars, 0);
    int degree = uniform(0, max_degree);
    for (int k = 0; k < degree && nvars > 0; ++k) e[uniform(0, nvars - 1)] += 1;
    p.add_term(e, rational());
  }
  return p;
}

EForm Gen::eform(const ChartPtr& chart, int degree, int terms) {
  EForm w(chart);
  const int r = chart->rank();
  if (degree > r) return w;
  for (int t = 0; t < terms; ++t) {
    IndexTuple tuple;
    while (static_cast<int>(tuple.size()) < degree) {
      int idx = uniform(1, r);
      if (std::find(tuple.begin(), tuple.end(), idx) == tuple.end()) tuple.push_back(idx);
    }
    w.add_term(tuple, poly(chart->base_dim()));
  }
  return w;
}

PolyVector Gen::polyvector(const ChartPtr& chart, int degree, int terms) {
  PolyVector v(chart);
  const int r = chart->rank();
  if (degree + 1 > r) return v;
  for (int t = 0; t < terms; ++t) {
    IndexTuple tuple;
    while (static_cast<int>(tuple.size()) < degree + 1) {
      int idx = uniform(1, r);
      if (std::find(tuple.begin(), tuple.end(), idx) == tuple.end()) tuple.push_back(idx);
    }
    v.add_term(tuple, poly(chart->base_dim()));
  }
  return v;
}

MixedSection Gen::section(const ChartPtr& chart, BundleKind kind, int truncation, int form_degree,
                          int fiber_degree, int payload_arity, int terms) {
  const int r = chart->rank();
  MixedSection s(chart, kind, truncation);
  if (form_degree > r || fiber_degree > truncation) return s;
  for (int t = 0; t < terms; ++t) {
    SectionKey key;
    while (static_cast<int>(key.xi.size()) < form_degree) {
      int idx = uniform(1, r);
      if (std::find(key.xi.begin(), key.xi.end(), idx) == key.xi.end()) key.xi.push_back(idx);
    }
    key.y.assign(r, 0);
    for (int k = 0; k < fiber_degree; ++k) key.y[uniform(0, r - 1)] += 1;
    if (kind == BundleKind::T) {
      if (payload_arity + 1 > r) return s;
      while (static_cast<int>(key.tpayload.size()) < payload_arity + 1) {
        int idx = uniform(1, r);
        if (std::find(key.tpayload.begin(), key.tpayload.end(), idx) == key.tpayload.end())
          key.tpayload.push_back(idx);
      }
    } else if (kind == BundleKind::D) {
      for (int slot = 0; slot < payload_arity + 1; ++slot) {
        std::vector<int> alpha(r, 0);
        int order = uniform(0, 2);
        for (int k = 0; k < order; ++k) alpha[uniform(0, r - 1)] += 1;
        key.dpayload.push_back(std::move(alpha));
      }
    }
    s.add_term(std::move(key), poly(chart->base_dim(), 1, 2));
  }
  return s;
}

}  // namespace algebroid
