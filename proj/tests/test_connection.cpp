#include "algebroid/connection.hpp"

#include "algebroid/gen.hpp"
#include "doctest.h"

using namespace algebroid;

namespace {

const std::vector<std::string>& builtins() {
  static const std::vector<std::string> names = {
      "tangent(2)", "abelian(2)",    "so3",          "sl2",
      "heisenberg", "foliation2in3", "poisson_cotangent(2;x1*e1^e2)"};
  return names;
}

// Torsion-free perturbation: Gamma = 1/2 c + S with S symmetric in (i, j).
Connection perturbed_torsion_free(const ChartPtr& chart, Gen& gen) {
  Connection conn = canonical_torsion_free(chart);
  const int r = chart->rank();
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j)
      for (int k = 1; k <= r; ++k) {
        Poly s = gen.poly(chart->base_dim(), 1, 1);
        conn.set_gamma(i, j, k, conn.gamma(i, j, k) + s);
        if (i != j) conn.set_gamma(j, i, k, conn.gamma(j, i, k) + s);
      }
  return conn;
}

}  // namespace

TEST_CASE("canonical connection on abelian charts is zero") {
  ChartPtr chart = builtin_chart("abelian(3)");
  Connection conn = canonical_torsion_free(chart);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k) CHECK(conn.gamma(i, j, k).is_zero());
  CHECK(torsion(conn).is_zero());
  CHECK(curvature(conn).is_zero());
}

TEST_CASE("canonical connection on so3 is half the epsilon table") {
  ChartPtr so3 = builtin_chart("so3");
  Connection conn = canonical_torsion_free(so3);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k)
        CHECK(conn.gamma(i, j, k) == so3->structure(i, j, k) * Rational(1, 2));
}

TEST_CASE("canonical connection is torsion free on every builtin chart") {
  for (const auto& name : builtins()) {
    CAPTURE(name);
    ChartPtr chart = builtin_chart(name);
    CHECK(torsion(canonical_torsion_free(chart)).is_zero());
  }
}

TEST_CASE("so3 curvature is the rank-one projector combination") {
  // R_{ijk}^l = 1/4 (delta_{il} delta_{jk} - delta_{ik} delta_{jl}),
  // obtained by contracting the epsilon tables by hand.
  ChartPtr so3 = builtin_chart("so3");
  ETensor curv = curvature(canonical_torsion_free(so3));
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k)
        for (int l = 1; l <= 3; ++l) {
          int expect = ((i == l && j == k) ? 1 : 0) - ((i == k && j == l) ? 1 : 0);
          CHECK(curv.at({l, i, j, k}) == Poly::constant(0, Rational(expect, 4)));
        }
  CHECK(curv.at({2, 1, 2, 1}) == Poly::constant(0, Rational(-1, 4)));
}

TEST_CASE("rank-1 tangent chart with x-dependent Gamma is flat") {
  ChartPtr chart = builtin_chart("tangent(1)");
  Connection conn(chart);
  conn.set_gamma(1, 1, 1, parse_poly("x1", 1));
  CHECK(torsion(conn).is_zero());
  CHECK(curvature(conn).is_zero());
}

TEST_CASE("curvature is antisymmetric in the first two lower indices") {
  Gen gen(41);
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    Connection conn(chart);
    const int r = chart->rank();
    for (int i = 1; i <= r; ++i)
      for (int j = 1; j <= r; ++j)
        for (int k = 1; k <= r; ++k) conn.set_gamma(i, j, k, gen.poly(chart->base_dim(), 1, 2));
    ETensor curv = curvature(conn);
    for (int i = 1; i <= r; ++i)
      for (int j = 1; j <= r; ++j)
        for (int k = 1; k <= r; ++k)
          for (int l = 1; l <= r; ++l)
            CHECK(curv.at({l, i, j, k}) == -curv.at({l, j, i, k}));
  }
}

TEST_CASE("covariant derivative basics") {
  ChartPtr chart = builtin_chart("poisson_cotangent(2;x1*e1^e2)");
  Connection conn = canonical_torsion_free(chart);

  // On functions it is the anchor action.
  ETensor f(chart, 0, 0);
  f.set({}, parse_poly("x1*x2", 2));
  for (int i = 1; i <= 2; ++i) {
    ETensor df = covariant_derivative(i, f, conn);
    CHECK(df.at({}) == chart->anchor_apply(i, parse_poly("x1*x2", 2)));
  }

  // On generators it returns the Christoffel symbols.
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) {
      ETensor ej(chart, 1, 0);
      ej.set({j}, chart->one());
      ETensor d = covariant_derivative(i, ej, conn);
      for (int k = 1; k <= 2; ++k) CHECK(d.at({k}) == conn.gamma(i, j, k));
    }
}

TEST_CASE("covariant derivative is compatible with contraction") {
  Gen gen(42);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    Connection conn = canonical_torsion_free(chart);
    const int r = chart->rank();
    for (int t = 0; t < 8; ++t) {
      ETensor xi(chart, 0, 1), v(chart, 1, 0);
      for (int i = 1; i <= r; ++i) {
        xi.set({i}, gen.poly(chart->base_dim(), 1, 2));
        v.set({i}, gen.poly(chart->base_dim(), 1, 2));
      }
      for (int dir = 1; dir <= r; ++dir) {
        Poly pairing(chart->base_dim());
        for (int i = 1; i <= r; ++i) pairing += xi.at({i}) * v.at({i});
        Poly lhs = chart->anchor_apply(dir, pairing);
        Poly rhs(chart->base_dim());
        ETensor dxi = covariant_derivative(dir, xi, conn);
        ETensor dv = covariant_derivative(dir, v, conn);
        for (int i = 1; i <= r; ++i) rhs += dxi.at({i}) * v.at({i}) + xi.at({i}) * dv.at({i});
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("Bianchi identities hold for canonical and perturbed connections") {
  Gen gen(43);
  for (const auto& name : builtins()) {
    CAPTURE(name);
    ChartPtr chart = builtin_chart(name);
    CHECK(bianchi_check(canonical_torsion_free(chart)).empty());
    Connection perturbed = perturbed_torsion_free(chart, gen);
    CHECK(is_torsion_free(perturbed));
    CHECK(bianchi_check(perturbed).empty());
  }
}

TEST_CASE("Bianchi identities hold for connections with torsion") {
  Gen gen(44);
  ChartPtr chart = builtin_chart("so3");
  Connection conn(chart);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k) conn.set_gamma(i, j, k, gen.poly(0, 0, 1));
  CHECK(!is_torsion_free(conn));
  CHECK(bianchi_check(conn).empty());
}
