#include "algebroid/polyvector.hpp"

#include "algebroid/gen.hpp"
#include "doctest.h"

using namespace algebroid;

namespace {

// Superfunction-calculus oracle for the tangent chart: generators act as
// d/dx_i, structure functions vanish, and the bracket is
//   [u, v] = sum_a dR(u)/de_a ^ dv/dx_a
//            - (-1)^{(p-1)(q-1)} sum_a dR(v)/de_a ^ du/dx_a
// with right odd derivatives dR. Entirely independent of schouten_bracket.
PolyVector oracle_tangent_bracket(const PolyVector& u, const PolyVector& v) {
  const ChartPtr& chart = u.chart();
  PolyVector out(chart);

  auto right_odd_derivative = [&](const IndexTuple& t, int a) -> std::pair<int, IndexTuple> {
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (t[s] != a) continue;
      auto [sign, rest] = remove_at(t, s);
      // remove_at gives the left-derivative sign (-1)^s; the right
      // derivative carries (-1)^{|t|-1-s}.
      int rsign = ((t.size() - 1 - s) % 2 == 0) ? 1 : -1;
      (void)sign;
      return {rsign, rest};
    }
    return {0, {}};
  };

  for (const auto& [tu, cu] : u.terms()) {
    for (const auto& [tv, cv] : v.terms()) {
      int p = static_cast<int>(tu.size());
      int q = static_cast<int>(tv.size());
      int swap_sign = ((p - 1) * (q - 1)) % 2 == 0 ? 1 : -1;
      for (int a = 1; a <= chart->rank(); ++a) {
        auto [s1, rest_u] = right_odd_derivative(tu, a);
        if (s1 != 0) {
          auto merged = wedge_merge(rest_u, tv);
          if (merged)
            out.add_term(merged->second,
                         (cu * cv.partial(a)) * Rational(s1 * merged->first));
        }
        auto [s2, rest_v] = right_odd_derivative(tv, a);
        if (s2 != 0) {
          auto merged = wedge_merge(rest_v, tu);
          if (merged)
            out.add_term(merged->second,
                         (cv * cu.partial(a)) * Rational(-swap_sign * s2 * merged->first));
        }
      }
    }
  }
  return out;
}

// The Prop 2.4 coordinate formula for brackets of two vector fields.
PolyVector oracle_vector_bracket(const PolyVector& u, const PolyVector& v) {
  const ChartPtr& chart = u.chart();
  const int r = chart->rank();
  PolyVector out(chart);
  auto coeff = [&](const PolyVector& w, int i) -> Poly {
    auto it = w.terms().find(IndexTuple{i});
    return it == w.terms().end() ? chart->zero() : it->second;
  };
  for (int k = 1; k <= r; ++k) {
    Poly ck = chart->zero();
    for (int i = 1; i <= r; ++i) {
      ck += coeff(u, i) * chart->anchor_apply(i, coeff(v, k));
      ck -= coeff(v, i) * chart->anchor_apply(i, coeff(u, k));
      for (int j = 1; j <= r; ++j) ck += coeff(u, i) * coeff(v, j) * chart->structure(i, j, k);
    }
    out.add_term({k}, ck);
  }
  return out;
}

}  // namespace

TEST_CASE("wedge basics") {
  ChartPtr so3 = builtin_chart("so3");
  PolyVector e1 = PolyVector::generator(so3, 1);
  PolyVector e2 = PolyVector::generator(so3, 2);
  PolyVector e3 = PolyVector::generator(so3, 3);

  PolyVector expect(so3);
  expect.add_term({1, 2}, so3->one());
  CHECK(wedge(e1, e2) == expect);
  CHECK(wedge(e2, e1) == -expect);
  CHECK(wedge(wedge(e1, e2), wedge(e1, e3)).is_zero());

  PolyVector f(so3, Poly::constant(0, Rational(3)));
  CHECK(wedge(f, e1) == e1 * Rational(3));
}

TEST_CASE("wedge is graded commutative and associative") {
  Gen gen(31);
  ChartPtr chart = builtin_chart("poisson_cotangent(2;x1*e1^e2)");
  for (int t = 0; t < 20; ++t) {
    int p = gen.uniform(0, 2), q = gen.uniform(0, 2);
    PolyVector a = gen.polyvector(chart, p - 1);
    PolyVector b = gen.polyvector(chart, q - 1);
    PolyVector c = gen.polyvector(chart, gen.uniform(-1, 1));
    CHECK(wedge(a, b) == wedge(b, a) * Rational((p * q) % 2 == 0 ? 1 : -1));
    CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
  }
}

TEST_CASE("generator brackets reproduce the structure functions") {
  ChartPtr so3 = builtin_chart("so3");
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      PolyVector lhs = schouten_bracket(PolyVector::generator(so3, i),
                                        PolyVector::generator(so3, j));
      PolyVector rhs(so3);
      for (int k = 1; k <= 3; ++k) rhs.add_term({k}, so3->structure(i, j, k));
      CHECK(lhs == rhs);
    }
}

TEST_CASE("bracket with a function is the anchor action") {
  ChartPtr chart = builtin_chart("poisson_cotangent(2;x1*e1^e2)");
  PolyVector u = parse_polyvector("e1", chart);
  PolyVector f(chart, parse_poly("x2", 2));
  CHECK(schouten_bracket(u, f) == PolyVector(chart, parse_poly("x1", 2)));

  // [u, f] = u^i rho(e_i)f for a random vector field
  Gen gen(32);
  for (int t = 0; t < 10; ++t) {
    PolyVector v = gen.polyvector(chart, 0);
    Poly g = gen.poly(2);
    Poly expect(2);
    for (int i = 1; i <= 2; ++i) {
      auto it = v.terms().find(IndexTuple{i});
      if (it != v.terms().end()) expect += it->second * chart->anchor_apply(i, g);
    }
    CHECK(schouten_bracket(v, PolyVector(chart, g)) == PolyVector(chart, expect));
  }
}

TEST_CASE("vector-vector brackets match the coordinate formula") {
  Gen gen(33);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)", "foliation2in3"}) {
    ChartPtr chart = builtin_chart(name);
    for (int t = 0; t < 10; ++t) {
      PolyVector u = gen.polyvector(chart, 0);
      PolyVector v = gen.polyvector(chart, 0);
      CHECK(schouten_bracket(u, v) == oracle_vector_bracket(u, v));
    }
  }
}

TEST_CASE("graded antisymmetry") {
  Gen gen(34);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    for (int t = 0; t < 20; ++t) {
      int ku = gen.uniform(-1, 2), kv = gen.uniform(-1, 2);
      PolyVector u = gen.polyvector(chart, ku);
      PolyVector v = gen.polyvector(chart, kv);
      int sign = (ku * kv) % 2 == 0 ? 1 : -1;
      CHECK(schouten_bracket(u, v) == schouten_bracket(v, u) * Rational(-sign));
    }
  }
}

TEST_CASE("Leibniz rule holds term by term") {
  Gen gen(35);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    for (int t = 0; t < 15; ++t) {
      int ku = gen.uniform(-1, 1), kv = gen.uniform(-1, 1);
      PolyVector u = gen.polyvector(chart, ku);
      PolyVector v = gen.polyvector(chart, kv);
      PolyVector w = gen.polyvector(chart, gen.uniform(-1, 1));
      PolyVector lhs = schouten_bracket(u, wedge(v, w));
      int sign = (ku * (kv + 1)) % 2 == 0 ? 1 : -1;
      PolyVector rhs =
          wedge(schouten_bracket(u, v), w) + wedge(v, schouten_bracket(u, w)) * Rational(sign);
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("graded Jacobi on homogeneous triples") {
  Gen gen(36);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    for (int t = 0; t < 12; ++t) {
      int k1 = gen.uniform(-1, 1), k2 = gen.uniform(-1, 1), k3 = gen.uniform(-1, 1);
      PolyVector u = gen.polyvector(chart, k1);
      PolyVector v = gen.polyvector(chart, k2);
      PolyVector w = gen.polyvector(chart, k3);
      auto sgn = [](long e) { return e % 2 == 0 ? Rational(1) : Rational(-1); };
      PolyVector total =
          schouten_bracket(u, schouten_bracket(v, w)) * sgn(static_cast<long>(k1) * k3) +
          schouten_bracket(v, schouten_bracket(w, u)) * sgn(static_cast<long>(k2) * k1) +
          schouten_bracket(w, schouten_bracket(u, v)) * sgn(static_cast<long>(k3) * k2);
      CHECK(total.is_zero());
    }
  }
}

TEST_CASE("tangent chart agrees with the classical Schouten-Nijenhuis oracle") {
  Gen gen(37);
  ChartPtr chart = builtin_chart("tangent(3)");
  for (int t = 0; t < 25; ++t) {
    PolyVector u = gen.polyvector(chart, gen.uniform(-1, 2));
    PolyVector v = gen.polyvector(chart, gen.uniform(-1, 2));
    CHECK(schouten_bracket(u, v) == oracle_tangent_bracket(u, v));
  }
}

TEST_CASE("parse_polyvector handles the documented syntax") {
  ChartPtr so3 = builtin_chart("so3");
  PolyVector v = parse_polyvector("1/2 * e1^e2 - e2^e3", so3);
  CHECK(v.terms().at({1, 2}) == Poly::constant(0, Rational(1, 2)));
  CHECK(v.terms().at({2, 3}) == Poly::constant(0, Rational(-1)));
  CHECK(parse_polyvector(v.str(), so3) == v);

  ChartPtr chart = builtin_chart("poisson_cotangent(2;x1*e1^e2)");
  PolyVector w = parse_polyvector("x1 * e1^e2 - 1/2 * e2", chart);
  CHECK(w.terms().at({1, 2}) == parse_poly("x1", 2));
  CHECK(parse_polyvector(w.str(), chart) == w);
}
