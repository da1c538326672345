// Command-line driver: loads charts/connections/bivectors, runs the
// validation and verification suites, and emits IDENT report lines
// (machine-parseable, one identity per line, exit 0 iff all OK).

#include <iostream>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "algebroid/chart.hpp"
#include "algebroid/connection.hpp"
#include "algebroid/enveloping.hpp"
#include "algebroid/fedosov.hpp"
#include "algebroid/gen.hpp"
#include "algebroid/polyvector.hpp"
#include "algebroid/quantization.hpp"

using namespace algebroid;

namespace {

struct Report {
  bool all_ok = true;

  void line(const std::string& name, bool ok, const std::string& detail = "", int degree = -1) {
    std::cout << "IDENT " << name;
    if (degree >= 0) std::cout << " degree<=" << degree;
    std::cout << (ok ? " OK" : " FAIL");
    if (!detail.empty()) std::cout << " " << detail;
    std::cout << "\n";
    if (!ok) all_ok = false;
  }
};

struct LoadedChart {
  ChartPtr chart;
  std::map<std::array<int, 3>, Poly> gamma;
  std::map<std::array<int, 2>, Poly> lambda;
};

LoadedChart load_chart(const std::string& spec) {
  if (spec.find('/') == std::string::npos && spec.find(".chart") == std::string::npos) {
    try {
      return {builtin_chart(spec), {}, {}};
    } catch (const ChartError& e) {
      if (std::string(e.what()).find("unknown builtin") == std::string::npos) throw;
      // fall through to file loading
    }
  }
  ChartFile file = load_chart_file(spec);
  return {file.chart, file.gamma, file.lambda};
}

Connection resolve_connection(const LoadedChart& loaded, const std::string& option) {
  if (option.empty() || option == "canonical") {
    if (!loaded.gamma.empty() && option.empty()) {
      Connection conn(loaded.chart);
      for (const auto& [ijk, value] : loaded.gamma)
        conn.set_gamma(ijk[0], ijk[1], ijk[2], value);
      return conn;
    }
    return canonical_torsion_free(loaded.chart);
  }
  ChartFile file = load_chart_file(option);
  require_same_chart(file.chart, loaded.chart);
  Connection conn(loaded.chart);
  for (const auto& [ijk, value] : file.gamma) conn.set_gamma(ijk[0], ijk[1], ijk[2], value);
  return conn;
}

std::string violations_summary(const std::vector<ChartViolation>& issues, std::size_t cap = 4) {
  std::string out;
  for (std::size_t k = 0; k < issues.size() && k < cap; ++k)
    out += (k ? "; " : "") + issues[k].identity + " = " + issues[k].residual.str();
  if (issues.size() > cap) out += "; ...";
  return out;
}

std::string violations_summary(const std::vector<IdentityViolation>& issues, std::size_t cap = 4) {
  std::string out;
  for (std::size_t k = 0; k < issues.size() && k < cap; ++k)
    out += (k ? "; " : "") + issues[k].identity + " = " + issues[k].residual.str();
  if (issues.size() > cap) out += "; ...";
  return out;
}

int cmd_validate(const std::string& chart_spec, const std::string& connection_spec,
                 std::uint64_t seed, int samples) {
  Report report;
  LoadedChart loaded = load_chart(chart_spec);
  const ChartPtr& chart = loaded.chart;
  std::cout << "chart: d=" << chart->base_dim() << " r=" << chart->rank() << "\n";

  auto issues = validate_chart(*chart);
  std::vector<ChartViolation> anchor_issues, jacobi_issues;
  for (auto& issue : issues)
    (issue.identity.rfind("anchor", 0) == 0 ? anchor_issues : jacobi_issues).push_back(issue);
  report.line("chart.anchor-morphism", anchor_issues.empty(), violations_summary(anchor_issues));
  report.line("chart.jacobi", jacobi_issues.empty(), violations_summary(jacobi_issues));

  Gen gen(seed);
  bool de_squared = true;
  for (int t = 0; t < samples; ++t) {
    EForm w = gen.eform(chart, gen.uniform(0, chart->rank()));
    if (!d_E(d_E(w)).is_zero()) de_squared = false;
  }
  report.line("chart.dE-squared", de_squared, "seed=" + std::to_string(seed));

  if (!connection_spec.empty()) {
    Connection conn = resolve_connection(loaded, connection_spec);
    report.line("connection.torsion-free", is_torsion_free(conn));
    auto bianchi = bianchi_check(conn);
    report.line("connection.bianchi", bianchi.empty(), violations_summary(bianchi));
  }
  return report.all_ok ? 0 : 1;
}

int cmd_export(const std::string& name, const std::string& output) {
  ChartPtr chart = builtin_chart(name);
  std::string text = write_chart_file(*chart);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    out << text;
  }
  return 0;
}

int cmd_form_d(const std::string& chart_spec, const std::string& expr) {
  LoadedChart loaded = load_chart(chart_spec);
  EForm w = parse_eform(expr, loaded.chart);
  std::cout << "d_E(" << w << ") = " << d_E(w) << "\n";
  return 0;
}

int cmd_bracket(const std::string& chart_spec, const std::string& kind, const std::string& lhs,
                const std::string& rhs) {
  LoadedChart loaded = load_chart(chart_spec);
  if (kind == "schouten") {
    PolyVector a = parse_polyvector(lhs, loaded.chart);
    PolyVector b = parse_polyvector(rhs, loaded.chart);
    std::cout << "[" << a << ", " << b << "]_E = " << schouten_bracket(a, b) << "\n";
  } else if (kind == "gerstenhaber") {
    PolyDiffOp a = parse_polydiffop(lhs, loaded.chart);
    PolyDiffOp b = parse_polydiffop(rhs, loaded.chart);
    std::cout << "[" << a.str() << ", " << b.str() << "]_G = "
              << gerstenhaber_bracket(a, b).str() << "\n";
  } else {
    throw CLI::ValidationError("--kind must be schouten or gerstenhaber");
  }
  return 0;
}

int cmd_curvature(const std::string& chart_spec, const std::string& connection_spec) {
  Report report;
  LoadedChart loaded = load_chart(chart_spec);
  Connection conn = resolve_connection(loaded, connection_spec);
  const int r = loaded.chart->rank();

  ETensor tors = torsion(conn);
  std::cout << "torsion:\n";
  for (const auto& [idx, value] : tors.entries())
    std::cout << "  T[" << idx[0] << ";" << idx[1] << "," << idx[2] << "] = " << value << "\n";
  if (tors.is_zero()) std::cout << "  0\n";

  ETensor curv = curvature(conn);
  std::cout << "curvature:\n";
  for (const auto& [idx, value] : curv.entries())
    std::cout << "  R[" << idx[0] << ";" << idx[1] << "," << idx[2] << "," << idx[3]
              << "] = " << value << "\n";
  if (curv.is_zero()) std::cout << "  0\n";

  report.line("connection.torsion-free", tors.is_zero());
  auto bianchi = bianchi_check(conn);
  report.line("connection.bianchi", bianchi.empty(), violations_summary(bianchi));
  (void)r;
  return report.all_ok ? 0 : 1;
}

int cmd_fedosov(const std::string& chart_spec, int degree, const std::string& connection_spec,
                std::uint64_t seed, int samples) {
  Report report;
  LoadedChart loaded = load_chart(chart_spec);
  const ChartPtr& chart = loaded.chart;
  Connection conn = resolve_connection(loaded, connection_spec);

  ETensor tors = torsion(conn);
  if (!tors.is_zero()) {
    std::cout << "refused: connection has torsion\n";
    for (const auto& [idx, value] : tors.entries())
      std::cout << "  T[" << idx[0] << ";" << idx[1] << "," << idx[2] << "] = " << value << "\n";
    return 1;
  }

  FlatStructure fs = solve_A(chart, conn, degree);
  for (int p = 2; p <= degree; ++p) {
    MixedSection ap = fs.A.y_component(p);
    std::cout << "A[" << p << "] = " << ap.str() << "\n";
  }

  report.line("fedosov.kappaA", kappa(fs.A).is_zero(), "", degree);
  report.line("fedosov.eq6-residual", flatness_residual(fs).is_zero(), "", degree - 1);

  Gen gen(seed);
  auto random_section = [&](BundleKind kind) {
    int form = gen.uniform(0, std::min(2, chart->rank()));
    int fiber = gen.uniform(0, std::min(2, degree));
    int arity = kind == BundleKind::W ? -1 : gen.uniform(-1, 1);
    return gen.section(chart, kind, degree, form, fiber, arity);
  };

  const char* kind_names[] = {"W", "T", "D"};
  BundleKind kinds[] = {BundleKind::W, BundleKind::T, BundleKind::D};
  for (int k = 0; k < 3; ++k) {
    bool hodge = true, dsq = true;
    for (int t = 0; t < samples; ++t) {
      MixedSection u = random_section(kinds[k]);
      if (delta(kappa(u)) + kappa(delta(u)) + harmonic(u) != u) hodge = false;
      if (!d_squared_residual(fs, u).is_zero()) dsq = false;
    }
    report.line(std::string("fedosov.hodge-eq2.") + kind_names[k], hodge,
                "seed=" + std::to_string(seed));
    report.line(std::string("fedosov.d-squared.") + kind_names[k], dsq,
                "seed=" + std::to_string(seed), reliable_degree(fs, kinds[k]));
  }

  bool theta_ok = true;
  for (int t = 0; t < samples; ++t) {
    Poly f = gen.poly(chart->base_dim(), 1, 2);
    MixedSection lift = theta_lift(fs, w_section(chart, degree, f));
    if (harmonic(lift) != w_section(chart, degree, f)) theta_ok = false;
    if (!flat_D(fs, lift).truncate_y(degree - 1).is_zero()) theta_ok = false;
    PolyVector v = gen.polyvector(chart, gen.uniform(0, 1));
    MixedSection tlift = theta_lift(fs, t_section(v, degree));
    if (harmonic_polyvector(tlift) != v) theta_ok = false;
    if (!flat_D(fs, tlift).truncate_y(degree - 1).is_zero()) theta_ok = false;
  }
  report.line("fedosov.theta-lift", theta_ok, "seed=" + std::to_string(seed), degree - 1);

  bool eq9 = true;
  std::string eq9_detail;
  for (int i = 1; i <= chart->rank() && eq9; ++i)
    for (int j = 1; j <= chart->rank() && eq9; ++j) {
      auto issues =
          bracket_transfer_check(PolyVector::generator(chart, i), PolyVector::generator(chart, j), fs);
      if (!issues.empty()) {
        eq9 = false;
        eq9_detail = violations_summary(issues);
      }
    }
  for (int t = 0; t < samples && eq9; ++t) {
    PolyVector u = gen.polyvector(chart, gen.uniform(0, 1));
    PolyVector v = gen.polyvector(chart, gen.uniform(-1, 1));
    auto issues = bracket_transfer_check(u, v, fs);
    if (!issues.empty()) {
      eq9 = false;
      eq9_detail = violations_summary(issues);
    }
  }
  report.line("fedosov.bracket-transfer-eq9", eq9, eq9_detail);

  auto mu_issues = mu_transfer_check(fs);
  report.line("fedosov.mu-cases", mu_issues.empty(), violations_summary(mu_issues));

  return report.all_ok ? 0 : 1;
}

int cmd_cohomology(const std::string& chart_spec, int max_arity, int max_order) {
  Report report;
  LoadedChart loaded = load_chart(chart_spec);
  auto windows = truncated_cohomology(loaded.chart, max_arity, max_order);
  for (const auto& win : windows) {
    std::cout << "arity " << win.arity << ": dim=" << win.dim << " ker=" << win.ker
              << " im=" << win.im << " detected=" << win.detected
              << " wedge-dim=" << win.wedge_dim << " hkr-spans=" << (win.hkr_spans ? "yes" : "no")
              << "\n";
    report.line("cohomology.window(" + std::to_string(win.arity) + ")",
                win.detected == win.wedge_dim && win.hkr_spans, "", max_order);
  }
  return report.all_ok ? 0 : 1;
}

int cmd_quantize(const std::string& chart_spec, const std::string& bivector_spec, int order,
                 int bound, const std::string& sample_a, const std::string& sample_b,
                 std::uint64_t seed, int samples) {
  Report report;
  LoadedChart loaded = load_chart(chart_spec);
  const ChartPtr& chart = loaded.chart;
  const int d = chart->base_dim();

  Bivector lambda(chart);
  if (!bivector_spec.empty())
    lambda = parse_bivector(bivector_spec, chart);
  else if (!loaded.lambda.empty())
    lambda = bivector_from_entries(chart, loaded.lambda);

  auto mc = maurer_cartan_check(lambda);
  report.line("quantize.maurer-cartan", mc.empty(), violations_summary(mc));
  if (!mc.empty()) return 1;

  FormalTwistor j = twistor_order1(lambda);
  for (int m = 2; m <= order; ++m) {
    try {
      j = twistor_extend(j, bound);
    } catch (const InconsistentAtBound& e) {
      std::cout << "inconsistent-at-bound: order " << e.order() << " bound " << e.bound()
                << " (retry with a larger --bound)\n";
      return 1;
    }
  }
  for (int m = 0; m <= j.order(); ++m)
    std::cout << "J[" << m << "] = " << j.at(m).str() << "\n";

  for (int m = 0; m <= j.order(); ++m) {
    PolyDiffOp residual = cocycle_residual(j, m);
    report.line("quantize.cocycle-residual(" + std::to_string(m) + ")", residual.is_zero());
    report.line("quantize.residual-routes-agree(" + std::to_string(m) + ")",
                residual == maurer_cartan_residual(j, m));
  }

  auto semi = semiclassical_check(j, lambda);
  report.line("quantize.semiclassical", semi.empty(), violations_summary(semi));

  TwistedHopf hopf = twisted_hopf(j);
  std::vector<Poly> hopf_samples;
  if (d == 0) {
    hopf_samples = {Poly::constant(0, Rational(2)), Poly::constant(0, Rational(-3, 2))};
  } else {
    hopf_samples.push_back(Poly::variable(d, 1));
    hopf_samples.push_back(parse_poly("x1*x1 + x" + std::to_string(d), d));
  }
  auto axioms = twisted_hopf_axiom_check(hopf, hopf_samples);
  report.line("quantize.hopf-axioms", axioms.empty(), violations_summary(axioms));

  Gen gen(seed);
  bool assoc = true;
  for (int t = 0; t < samples; ++t) {
    PolySeries sa, sb, sc;
    sa.coeffs = {gen.poly(d, 2, 2)};
    sb.coeffs = {gen.poly(d, 2, 2)};
    sc.coeffs = {gen.poly(d, 2, 2)};
    PolySeries left = star(star(sa, sb, j), sc, j);
    PolySeries right = star(sa, star(sb, sc, j), j);
    for (int m = 0; m <= left.order(); ++m)
      if (left.coeffs[m] != right.coeffs[m]) assoc = false;
  }
  report.line("quantize.star-associativity", assoc, "seed=" + std::to_string(seed));

  Poly a = sample_a.empty() ? (d > 0 ? Poly::variable(d, 1) : Poly::constant(0, Rational(2)))
                            : parse_poly(sample_a, d);
  Poly b = sample_b.empty()
               ? (d > 0 ? Poly::variable(d, std::min(2, d)) : Poly::constant(0, Rational(3)))
               : parse_poly(sample_b, d);
  PolySeries product = twisted_product(a, b, j);
  std::cout << "star product of a = " << a << " and b = " << b << ":\n";
  for (int m = 0; m <= product.order(); ++m)
    std::cout << "order " << m << ": " << product.coeffs[m] << "\n";

  return report.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact symbolic calculus for Lie algebroids"};
  app.require_subcommand(1);

  std::string chart_spec, connection_spec, expr, lhs, rhs, output, bivector_spec;
  std::string kind = "schouten", sample_a, sample_b;
  std::uint64_t seed = 1;
  int samples = 20, degree = 4, max_arity = 1, max_order = 3, order = 2, bound = 2;

  auto* validate = app.add_subcommand("validate", "check the Lie algebroid axioms");
  validate->add_option("chart", chart_spec, "builtin name or chart file")->required();
  validate->add_option("--connection", connection_spec, "canonical or a gamma file");
  validate->add_option("--seed", seed);
  validate->add_option("--samples", samples);

  auto* exporter = app.add_subcommand("export", "print a builtin chart in the file format");
  exporter->add_option("name", chart_spec)->required();
  exporter->add_option("-o,--output", output);

  auto* formd = app.add_subcommand("form-d", "apply the E-de Rham differential");
  formd->add_option("--chart", chart_spec)->required();
  formd->add_option("form", expr, "e.g. 'x1 * xi1^xi2'")->required();

  auto* bracket = app.add_subcommand("bracket", "Schouten or Gerstenhaber bracket");
  bracket->add_option("--chart", chart_spec)->required();
  bracket->add_option("--kind", kind, "schouten | gerstenhaber");
  bracket->add_option("lhs", lhs)->required();
  bracket->add_option("rhs", rhs)->required();

  auto* curv = app.add_subcommand("curvature", "torsion, curvature, Bianchi identities");
  curv->add_option("chart", chart_spec)->required();
  curv->add_option("--connection", connection_spec);

  auto* fedosov = app.add_subcommand("fedosov", "flattening recursion and residual table");
  fedosov->add_option("chart", chart_spec)->required();
  fedosov->add_option("--degree", degree, "fiber truncation N >= 2");
  fedosov->add_option("--connection", connection_spec);
  fedosov->add_option("--seed", seed);
  fedosov->add_option("--samples", samples);

  auto* cohomology = app.add_subcommand("cohomology", "truncated Hochschild windows (d = 0)");
  cohomology->add_option("chart", chart_spec)->required();
  cohomology->add_option("--max-arity", max_arity);
  cohomology->add_option("--max-order", max_order);

  auto* quantize = app.add_subcommand("quantize", "order-by-order twistor quantization");
  quantize->add_option("chart", chart_spec)->required();
  quantize->add_option("--bivector", bivector_spec, "e.g. 'x1*e1^e2' (default: lambda file lines)");
  quantize->add_option("--order", order, "hbar truncation order n >= 1");
  quantize->add_option("--bound", bound, "per-slot operator order bound L");
  quantize->add_option("--sample-a", sample_a);
  quantize->add_option("--sample-b", sample_b);
  quantize->add_option("--seed", seed);
  quantize->add_option("--samples", samples);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate))
      return cmd_validate(chart_spec, connection_spec, seed, samples);
    if (app.got_subcommand(exporter)) return cmd_export(chart_spec, output);
    if (app.got_subcommand(formd)) return cmd_form_d(chart_spec, expr);
    if (app.got_subcommand(bracket)) return cmd_bracket(chart_spec, kind, lhs, rhs);
    if (app.got_subcommand(curv)) return cmd_curvature(chart_spec, connection_spec);
    if (app.got_subcommand(fedosov))
      return cmd_fedosov(chart_spec, degree, connection_spec, seed, samples);
    if (app.got_subcommand(cohomology)) return cmd_cohomology(chart_spec, max_arity, max_order);
    if (app.got_subcommand(quantize))
      return cmd_quantize(chart_spec, bivector_spec, order, bound, sample_a, sample_b, seed,
                          samples);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
