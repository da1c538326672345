// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// exact identities throughout (no tolerances). Exit code 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <vector>

#include "algebroid/chart.hpp"
#include "algebroid/connection.hpp"
#include "algebroid/enveloping.hpp"
#include "algebroid/fedosov.hpp"
#include "algebroid/gen.hpp"
#include "algebroid/polyvector.hpp"
#include "algebroid/quantization.hpp"

using namespace algebroid;

namespace {

const std::vector<std::string>& builtins() {
  static const std::vector<std::string> names = {
      "tangent(2)", "abelian(2)",    "so3",          "sl2",
      "heisenberg", "foliation2in3", "poisson_cotangent(2;x1*e1^e2)"};
  return names;
}

bool check(bool condition, const char* what, bool& ok) {
  if (!condition) {
    std::cout << "    failed: " << what << "\n";
    ok = false;
  }
  return condition;
}

// ---- criterion 1: chart axioms <-> d_E^2 = 0 -----------------------------

ChartPtr perturb(const ChartPtr& base, int i, int j, int k) {
  auto broken = std::make_shared<Chart>(*base);
  broken->set_structure(i, j, k,
                        base->structure(i, j, k) + Poly::constant(base->base_dim(), Rational(1)));
  return broken;
}

bool criterion1() {
  bool ok = true;
  Gen gen(101);
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    check(validate_chart(*chart).empty(), "builtin chart validates", ok);
    for (int t = 0; t < 50; ++t) {
      EForm w = gen.eform(chart, gen.uniform(0, chart->rank()), 2);
      check(d_E(d_E(w)).is_zero(), "d_E^2 = 0 on a random form", ok);
    }
  }

  std::vector<ChartPtr> broken = {
      perturb(builtin_chart("so3"), 1, 2, 1), perturb(builtin_chart("so3"), 2, 3, 2),
      perturb(builtin_chart("heisenberg"), 1, 3, 1), perturb(builtin_chart("sl2"), 2, 3, 2),
      perturb(builtin_chart("sl2"), 1, 2, 1)};
  for (const auto& chart : broken) {
    check(!validate_chart(*chart).empty(), "perturbed chart fails validation", ok);
    bool nonzero = false;
    for (int i = 1; i <= chart->rank() && !nonzero; ++i) {
      EForm w(chart);
      w.add_term({i}, chart->one());
      if (!d_E(d_E(w)).is_zero()) nonzero = true;
    }
    for (int t = 0; t < 10 && !nonzero; ++t)
      if (!d_E(d_E(gen.eform(chart, gen.uniform(0, chart->rank())))).is_zero()) nonzero = true;
    check(nonzero, "perturbed chart has d_E^2 != 0 on some form", ok);
  }
  return ok;
}

// ---- criterion 2: HKR chain map ------------------------------------------

bool criterion2() {
  bool ok = true;
  Gen gen(102);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    for (int t = 0; t < 50; ++t) {
      PolyVector v = gen.polyvector(chart, gen.uniform(-1, 2), 2);
      check(hochschild_d(hkr(v)).is_zero(), "d(hkr(v)) = 0", ok);
    }
  }
  return ok;
}

// ---- criterion 3: truncated HKR quasi-isomorphism ------------------------

bool criterion3() {
  bool ok = true;
  for (int r = 1; r <= 3; ++r) {
    ChartPtr chart = builtin_chart("abelian(" + std::to_string(r) + ")");
    auto windows = truncated_cohomology(chart, 1, 3);
    for (const auto& win : windows) {
      check(win.detected == win.wedge_dim, "window rank matches dim Wedge^{k+1}", ok);
      check(win.hkr_spans, "hkr classes span the detected cohomology", ok);
    }
  }
  return ok;
}

// ---- criterion 4: Hodge identity -----------------------------------------

bool criterion4() {
  bool ok = true;
  Gen gen(104);
  const BundleKind kinds[] = {BundleKind::W, BundleKind::T, BundleKind::D};
  int produced = 0;
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)"}) {
    ChartPtr chart = builtin_chart(name);
    int count = 0;
    while (count < 50) {
      for (int form = 0; form <= chart->rank() && count < 50; ++form) {
        for (int fiber = 0; form + fiber <= 6 && count < 50; ++fiber) {
          BundleKind kind = kinds[count % 3];
          MixedSection u =
              gen.section(chart, kind, 6, form, fiber, kind == BundleKind::W ? -1 : gen.uniform(-1, 1));
          check(delta(kappa(u)) + kappa(delta(u)) + harmonic(u) == u, "Hodge identity", ok);
          ++count;
          ++produced;
        }
      }
    }
  }
  check(produced >= 100, "one hundred sections exercised", ok);
  return ok;
}

// ---- criterion 5: flattening ---------------------------------------------

bool criterion5() {
  bool ok = true;
  Gen gen(105);
  for (const char* name : {"so3", "poisson_cotangent(2;x1*e1^e2)", "heisenberg"}) {
    ChartPtr chart = builtin_chart(name);
    FlatStructure fs = solve_A(chart, canonical_torsion_free(chart), 4);
    check(kappa(fs.A).is_zero(), "kappa A = 0", ok);
    check(flatness_residual(fs).is_zero(), "Eq.(6) residual = 0 mod degree 4", ok);
    const BundleKind kinds[] = {BundleKind::W, BundleKind::T, BundleKind::D};
    for (int t = 0; t < 20; ++t) {
      BundleKind kind = kinds[t % 3];
      MixedSection s = gen.section(chart, kind, 4, gen.uniform(0, std::min(2, chart->rank())),
                                   gen.uniform(0, 2), kind == BundleKind::W ? -1 : gen.uniform(-1, 1));
      check(d_squared_residual(fs, s).is_zero(), "D^2 = 0 within the reliable bound", ok);
    }
  }
  return ok;
}

// ---- criterion 6: theta lift ---------------------------------------------

bool criterion6() {
  bool ok = true;
  Gen gen(106);
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    FlatStructure fs = solve_A(chart, canonical_torsion_free(chart), 4);
    std::vector<int> zero(chart->rank(), 0);
    for (int t = 0; t < 20; ++t) {
      // W
      Poly f = gen.poly(chart->base_dim(), 1, 2);
      MixedSection wl = theta_lift(fs, w_section(chart, 4, f));
      check(harmonic(wl) == w_section(chart, 4, f), "H(theta(f)) = f", ok);
      check(flat_D(fs, wl).truncate_y(3).is_zero(), "D(theta(f)) = 0 mod truncation", ok);
      // T
      PolyVector v = gen.polyvector(chart, gen.uniform(0, 1));
      MixedSection tl = theta_lift(fs, t_section(v, 4));
      check(harmonic_polyvector(tl) == v, "H(theta(v)) = v", ok);
      check(flat_D(fs, tl).truncate_y(3).is_zero(), "D(theta(v)) = 0 mod truncation", ok);
      // D
      MixedSection op(chart, BundleKind::D, 4);
      std::vector<std::vector<int>> slots(gen.uniform(1, 2), zero);
      for (auto& slot : slots) slot[gen.uniform(0, chart->rank() - 1)] += gen.uniform(0, 2);
      op.add_term({{}, zero, {}, slots}, gen.poly(chart->base_dim(), 1, 2));
      MixedSection dl = theta_lift(fs, op);
      check(harmonic(dl) == op, "H(theta(P)) = P", ok);
      check(flat_D(fs, dl).truncate_y(3).is_zero(), "D(theta(P)) = 0 mod truncation", ok);
    }

    // first-order closed forms
    Poly f = gen.poly(chart->base_dim(), 2, 3);
    MixedSection wl = theta_lift(fs, w_section(chart, 4, f));
    MixedSection expect(chart, BundleKind::W, 4);
    expect.add_term({{}, zero, {}, {}}, f);
    for (int i = 1; i <= chart->rank(); ++i) {
      std::vector<int> y = zero;
      y[i - 1] = 1;
      expect.add_term({{}, y, {}, {}}, chart->anchor_apply(i, f));
    }
    check(wl.truncate_y(1) == expect, "theta(f) first order = f + y^i rho(e_i)f", ok);

    PolyVector u = gen.polyvector(chart, 0);
    MixedSection tl = theta_lift(fs, t_section(u, 4));
    MixedSection texpect = t_section(u, 4);
    auto coeff = [&](int i) {
      auto it = u.terms().find(IndexTuple{i});
      return it == u.terms().end() ? chart->zero() : it->second;
    };
    for (int i = 1; i <= chart->rank(); ++i)
      for (int k = 1; k <= chart->rank(); ++k) {
        Poly value = chart->anchor_apply(i, coeff(k));
        for (int j = 1; j <= chart->rank(); ++j) value += fs.conn.gamma(i, j, k) * coeff(j);
        std::vector<int> y = zero;
        y[i - 1] = 1;
        texpect.add_term({{}, y, {k}, {}}, value);
      }
    check(tl.truncate_y(1) == texpect,
          "theta(u) first order = u + y^i (rho(e_i)u^k + Gamma_{ij}^k u^j) d/dy^k", ok);
  }
  return ok;
}

// ---- criterion 7: bracket transfer ---------------------------------------

bool criterion7() {
  bool ok = true;
  Gen gen(107);
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    FlatStructure fs = solve_A(chart, canonical_torsion_free(chart), 3);
    for (int i = 1; i <= chart->rank(); ++i)
      for (int j = 1; j <= chart->rank(); ++j)
        check(bracket_transfer_check(PolyVector::generator(chart, i),
                                     PolyVector::generator(chart, j), fs)
                  .empty(),
              "Eq.(9) on generator pairs", ok);
    for (int t = 0; t < 20; ++t) {
      PolyVector u = gen.polyvector(chart, gen.uniform(0, 1));
      PolyVector v = gen.polyvector(chart, gen.uniform(-1, 1));
      check(bracket_transfer_check(u, v, fs).empty(), "Eq.(9) on random degree <= 1 pairs", ok);
    }
  }
  return ok;
}

// ---- criterion 8: PBW comparison -----------------------------------------

bool criterion8() {
  bool ok = true;
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    FlatStructure fs = solve_A(chart, canonical_torsion_free(chart), 4);
    auto report = mu_transfer_check(fs);
    if (!report.empty()) {
      std::cout << "    " << name << ": " << report.front().identity << "\n";
      ok = false;
    }
    // the displayed second-order mu formula
    for (int i = 1; i <= chart->rank(); ++i)
      for (int j = 1; j <= chart->rank(); ++j) {
        std::vector<int> alpha(chart->rank(), 0);
        alpha[i - 1] += 1;
        alpha[j - 1] += 1;
        UEElement expect = ue_mul(UEElement::generator(chart, i), UEElement::generator(chart, j)) +
                           ue_mul(UEElement::generator(chart, j), UEElement::generator(chart, i));
        for (int k = 1; k <= chart->rank(); ++k)
          expect -= UEElement::generator(chart, k) *
                    (fs.conn.gamma(i, j, k) + fs.conn.gamma(j, i, k));
        check(mu_single(fs.conn, alpha) == expect * Rational(1, 2),
              "mu(d^2/dy^i dy^j) second-order formula", ok);
      }
  }
  return ok;
}

// ---- criterion 9: quantization -------------------------------------------

bool criterion9_case(const ChartPtr& chart, const Bivector& lambda, bool& ok) {
  FormalTwistor j = twistor_order1(lambda);
  bool extended = false;
  for (int bound = 2; bound <= 4 && !extended; ++bound) {
    try {
      j = twistor_extend(j, bound);
      extended = true;
    } catch (const InconsistentAtBound&) {
    }
  }
  if (!check(extended, "order-2 twistor found at some bound <= 4", ok)) return false;
  for (int m = 0; m <= 2; ++m) {
    check(cocycle_residual(j, m).is_zero(), "Eq.(11) residual = 0 mod hbar^3", ok);
    check(cocycle_residual(j, m) == maurer_cartan_residual(j, m),
          "both residual routes agree", ok);
  }
  check(semiclassical_check(j, lambda).empty(), "(J - J^op)/hbar = Lambda at order 0", ok);

  TwistedHopf hopf = twisted_hopf(j);
  std::vector<Poly> samples;
  if (chart->base_dim() == 0) {
    samples = {Poly::constant(0, Rational(2)), Poly::constant(0, Rational(-3, 2))};
  } else {
    samples = {Poly::variable(chart->base_dim(), 1),
               parse_poly("x1*x1 + x" + std::to_string(chart->base_dim()), chart->base_dim())};
  }
  auto axioms = twisted_hopf_axiom_check(hopf, samples);
  if (!axioms.empty()) std::cout << "    axiom: " << axioms.front().identity << "\n";
  check(axioms.empty(), "Def B.1 axioms hold mod hbar^3", ok);

  Gen gen(109);
  for (int t = 0; t < 20; ++t) {
    PolySeries sa, sb, sc;
    sa.coeffs = {gen.poly(chart->base_dim(), 2, 2)};
    sb.coeffs = {gen.poly(chart->base_dim(), 2, 2)};
    sc.coeffs = {gen.poly(chart->base_dim(), 2, 2)};
    PolySeries left = star(star(sa, sb, j), sc, j);
    PolySeries right = star(sa, star(sb, sc, j), j);
    bool equal = true;
    for (int m = 0; m <= left.order(); ++m)
      if (left.coeffs[m] != right.coeffs[m]) equal = false;
    check(equal, "star associativity mod hbar^3", ok);
  }
  return ok;
}

bool criterion9() {
  bool ok = true;
  {
    ChartPtr chart = builtin_chart("abelian(2)");
    Bivector lambda(chart);
    lambda.set(1, 2, chart->one());
    criterion9_case(chart, lambda, ok);
  }
  {
    ChartPtr chart = builtin_chart("poisson_cotangent(2;x1*e1^e2)");
    Bivector lambda(chart);
    lambda.set(1, 2, parse_poly("x1", 2));
    criterion9_case(chart, lambda, ok);
  }
  return ok;
}

// ---- criterion 10: connection appendix -----------------------------------

bool criterion10() {
  bool ok = true;
  Gen gen(110);
  for (const auto& name : builtins()) {
    ChartPtr chart = builtin_chart(name);
    Connection canonical = canonical_torsion_free(chart);
    check(torsion(canonical).is_zero(), "canonical connection is torsion-free", ok);
    check(bianchi_check(canonical).empty(), "Bianchi identities for the canonical connection", ok);
    for (int t = 0; t < 5; ++t) {
      Connection conn = canonical_torsion_free(chart);
      const int r = chart->rank();
      for (int i = 1; i <= r; ++i)
        for (int j = i; j <= r; ++j)
          for (int k = 1; k <= r; ++k) {
            Poly s = gen.poly(chart->base_dim(), 1, 1);
            conn.set_gamma(i, j, k, conn.gamma(i, j, k) + s);
            if (i != j) conn.set_gamma(j, i, k, conn.gamma(j, i, k) + s);
          }
      check(is_torsion_free(conn), "perturbation stays torsion-free", ok);
      check(bianchi_check(conn).empty(), "Bianchi identities for the perturbation", ok);
    }
  }
  return ok;
}

struct Criterion {
  int number;
  const char* name;
  double budget_seconds;
  std::function<bool()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "chart-axioms-and-dE-squared", 10, criterion1},
      {2, "hkr-chain-map", 30, criterion2},
      {3, "truncated-hkr-quasi-isomorphism", 120, criterion3},
      {4, "hodge-identity", 30, criterion4},
      {5, "fedosov-flattening", 120, criterion5},
      {6, "theta-lift", 60, criterion6},
      {7, "bracket-transfer", 60, criterion7},
      {8, "pbw-comparison", 60, criterion8},
      {9, "twistor-quantization", 300, criterion9},
      {10, "connection-appendix", 60, criterion10},
  };

  int passed = 0;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    bool ok = criterion.run();
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = seconds < criterion.budget_seconds;
    if (!in_budget)
      std::cout << "    over budget: " << seconds << "s > " << criterion.budget_seconds << "s\n";
    bool pass = ok && in_budget;
    std::cout << "CRITERION " << criterion.number << " " << criterion.name << " "
              << (pass ? "PASS" : "FAIL") << " (" << seconds << "s)" << std::endl;
    if (pass) ++passed;
  }
  std::cout << "ACCEPTANCE " << passed << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
