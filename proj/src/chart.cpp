#include "algebroid/chart.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "graded_expr.hpp"

namespace algebroid {

Chart::Chart(int base_dim, int rank) : base_dim_(base_dim), rank_(rank) {
  if (base_dim < 0 || rank < 1) throw std::invalid_argument("chart needs d >= 0 and r >= 1");
  anchor_.assign(static_cast<std::size_t>(rank) * base_dim, Poly(base_dim));
}

void Chart::set_anchor(int i, int a, const Poly& value) {
  if (i < 1 || i > rank_ || a < 1 || a > base_dim_)
    throw std::out_of_range("anchor index out of range");
  if (value.nvars() != base_dim_) throw std::invalid_argument("anchor entry nvars mismatch");
  anchor_[static_cast<std::size_t>(i - 1) * base_dim_ + (a - 1)] = value;
}

void Chart::set_structure(int i, int j, int k, const Poly& value) {
  if (i < 1 || j < 1 || k < 1 || i > rank_ || j > rank_ || k > rank_)
    throw std::out_of_range("structure index out of range");
  if (i >= j) throw std::invalid_argument("structure entries require i < j");
  if (value.nvars() != base_dim_) throw std::invalid_argument("structure entry nvars mismatch");
  if (value.is_zero())
    structure_.erase({i, j, k});
  else
    structure_[{i, j, k}] = value;
}

const Poly& Chart::anchor(int i, int a) const {
  if (i < 1 || i > rank_ || a < 1 || a > base_dim_)
    throw std::out_of_range("anchor index out of range");
  return anchor_[static_cast<std::size_t>(i - 1) * base_dim_ + (a - 1)];
}

Poly Chart::structure(int i, int j, int k) const {
  if (i < 1 || j < 1 || k < 1 || i > rank_ || j > rank_ || k > rank_)
    throw std::out_of_range("structure index out of range");
  if (i == j) return Poly(base_dim_);
  auto it = structure_.find(i < j ? std::array<int, 3>{i, j, k} : std::array<int, 3>{j, i, k});
  if (it == structure_.end()) return Poly(base_dim_);
  return i < j ? it->second : -it->second;
}

Poly Chart::anchor_apply(int i, const Poly& f) const {
  Poly out(base_dim_);
  for (int a = 1; a <= base_dim_; ++a) {
    const Poly& rho = anchor(i, a);
    if (!rho.is_zero()) out += rho * f.partial(a);
  }
  return out;
}

bool Chart::operator==(const Chart& o) const {
  return base_dim_ == o.base_dim_ && rank_ == o.rank_ && anchor_ == o.anchor_ &&
         structure_ == o.structure_;
}

void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
  if (a == b) return;
  if (a && b && *a == *b) return;
  throw std::invalid_argument("chart mismatch");
}

std::vector<ChartViolation> validate_chart(const Chart& chart) {
  std::vector<ChartViolation> report;
  const int d = chart.base_dim();
  const int r = chart.rank();

  // Anchor is a bracket morphism on generators:
  //   rho(e_i).rho_{ja} - rho(e_j).rho_{ia} = c_{ij}^k rho_{ka}.
  for (int i = 1; i <= r; ++i) {
    for (int j = i + 1; j <= r; ++j) {
      for (int a = 1; a <= d; ++a) {
        Poly lhs = chart.anchor_apply(i, chart.anchor(j, a)) -
                   chart.anchor_apply(j, chart.anchor(i, a));
        for (int k = 1; k <= r; ++k) lhs -= chart.structure(i, j, k) * chart.anchor(k, a);
        if (!lhs.is_zero()) {
          std::ostringstream name;
          name << "anchor(" << i << "," << j << ";" << a << ")";
          report.push_back({name.str(), lhs});
        }
      }
    }
  }

  // Jacobi on generator triples, expanded through the Leibniz rule: the
  // anchor derivatives of the structure functions enter alongside the
  // quadratic c-terms.
  for (int i = 1; i <= r; ++i) {
    for (int j = i + 1; j <= r; ++j) {
      for (int k = j + 1; k <= r; ++k) {
        for (int l = 1; l <= r; ++l) {
          Poly sum = chart.anchor_apply(i, chart.structure(j, k, l)) +
                     chart.anchor_apply(j, chart.structure(k, i, l)) +
                     chart.anchor_apply(k, chart.structure(i, j, l));
          for (int m = 1; m <= r; ++m) {
            sum += chart.structure(j, k, m) * chart.structure(i, m, l);
            sum += chart.structure(k, i, m) * chart.structure(j, m, l);
            sum += chart.structure(i, j, m) * chart.structure(k, m, l);
          }
          if (!sum.is_zero()) {
            std::ostringstream name;
            name << "jacobi(" << i << "," << j << "," << k << ";" << l << ")";
            report.push_back({name.str(), sum});
          }
        }
      }
    }
  }
  return report;
}

EForm::EForm(ChartPtr chart, const Poly& function) : chart_(std::move(chart)) {
  add_term({}, function);
}

void EForm::add_term(IndexTuple tuple, const Poly& coeff) {
  if (coeff.is_zero()) return;
  int sign = sort_tuple(tuple);
  if (sign == 0) return;
  for (int idx : tuple)
    if (idx < 1 || idx > chart_->rank()) throw std::out_of_range("form index out of range");
  Poly value = sign == 1 ? coeff : -coeff;
  auto [it, inserted] = terms_.emplace(std::move(tuple), value);
  if (!inserted) {
    it->second += value;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int EForm::max_degree() const {
  int deg = -1;
  for (const auto& [t, c] : terms_) deg = std::max(deg, static_cast<int>(t.size()));
  return deg;
}

EForm EForm::operator-() const {
  EForm r(chart_);
  for (const auto& [t, c] : terms_) r.terms_.emplace(t, -c);
  return r;
}

EForm& EForm::operator+=(const EForm& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [t, c] : o.terms_) add_term(t, c);
  return *this;
}

EForm& EForm::operator-=(const EForm& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [t, c] : o.terms_) add_term(t, -c);
  return *this;
}

EForm EForm::operator*(const Rational& c) const {
  EForm r(chart_);
  if (c.is_zero()) return r;
  for (const auto& [t, cc] : terms_) r.terms_.emplace(t, cc * c);
  return r;
}

EForm EForm::wedge(const EForm& o) const {
  require_same_chart(chart_, o.chart_);
  EForm r(chart_);
  for (const auto& [ta, ca] : terms_) {
    for (const auto& [tb, cb] : o.terms_) {
      auto merged = wedge_merge(ta, tb);
      if (!merged) continue;
      r.add_term(merged->second, (ca * cb) * Rational(merged->first));
    }
  }
  return r;
}

std::string EForm::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c << ")";
    for (int idx : t) os << (idx == t.front() ? " * " : "^") << "xi" << idx;
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const EForm& w) { return os << w.str(); }

EForm d_E(const EForm& form) {
  const ChartPtr& chart = form.chart();
  const int r = chart->rank();
  EForm out(chart);
  for (const auto& [tuple, coeff] : form.terms()) {
    // xi^i rho(e_i) acting on the coefficient.
    for (int i = 1; i <= r; ++i) {
      Poly g = chart->anchor_apply(i, coeff);
      if (g.is_zero()) continue;
      auto merged = wedge_merge({i}, tuple);
      if (!merged) continue;
      out.add_term(merged->second, g * Rational(merged->first));
    }
    // -1/2 xi^i ^ xi^j c_{ij}^k d/dxi^k, both orientations of each stored
    // (i < j) entry.
    for (std::size_t pos = 0; pos < tuple.size(); ++pos) {
      int k = tuple[pos];
      auto [inner_sign, rest] = remove_at(tuple, pos);
      for (const auto& [key, c] : chart->structure_terms()) {
        if (key[2] != k) continue;
        const auto oriented = {std::make_pair(std::make_pair(key[0], key[1]), c),
                               std::make_pair(std::make_pair(key[1], key[0]), -c)};
        for (const auto& [ij, cval] : oriented) {
          auto m1 = wedge_merge({ij.second}, rest);
          if (!m1) continue;
          auto m2 = wedge_merge({ij.first}, m1->second);
          if (!m2) continue;
          Rational factor(-(m1->first * m2->first * inner_sign), 2);
          out.add_term(m2->second, (coeff * cval) * factor);
        }
      }
    }
  }
  return out;
}

EForm parse_eform(const std::string& text, const ChartPtr& chart) {
  EForm out(chart);
  for (auto& term : detail::parse_graded_expr(text, chart->base_dim(), "xi", false))
    out.add_term(term.indices, term.coeff);
  return out;
}

namespace {

ChartPtr make_tangent(int d) {
  auto chart = std::make_shared<Chart>(d, d);
  for (int i = 1; i <= d; ++i) chart->set_anchor(i, i, Poly::constant(d, Rational(1)));
  return chart;
}

ChartPtr make_abelian(int r) { return std::make_shared<Chart>(0, r); }

ChartPtr make_so3() {
  auto chart = std::make_shared<Chart>(0, 3);
  Poly one = Poly::constant(0, Rational(1));
  chart->set_structure(1, 2, 3, one);
  chart->set_structure(2, 3, 1, one);
  chart->set_structure(1, 3, 2, -one);
  return chart;
}

// Basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
ChartPtr make_sl2() {
  auto chart = std::make_shared<Chart>(0, 3);
  chart->set_structure(1, 2, 2, Poly::constant(0, Rational(2)));
  chart->set_structure(1, 3, 3, Poly::constant(0, Rational(-2)));
  chart->set_structure(2, 3, 1, Poly::constant(0, Rational(1)));
  return chart;
}

ChartPtr make_heisenberg() {
  auto chart = std::make_shared<Chart>(0, 3);
  chart->set_structure(1, 2, 3, Poly::constant(0, Rational(1)));
  return chart;
}

// Rank-2 foliation of R^3 by {x1 = const} planes, written in a non-flat
// frame: e1 -> d/dx2, e2 -> x2 d/dx2 + d/dx3, so [e1, e2] = e1. The anchor
// is injective at every point.
ChartPtr make_foliation2in3() {
  auto chart = std::make_shared<Chart>(3, 2);
  chart->set_anchor(1, 2, Poly::constant(3, Rational(1)));
  chart->set_anchor(2, 2, Poly::variable(3, 2));
  chart->set_anchor(2, 3, Poly::constant(3, Rational(1)));
  chart->set_structure(1, 2, 1, Poly::constant(3, Rational(1)));
  return chart;
}

// Cotangent algebroid of a polynomial bivector pi on R^d: E = T*X with
// generators e_i = dx_i, anchor rho(dx_i) = pi^{ia} d/dx_a and Koszul
// structure functions c_{ij}^k = d(pi^{ij})/dx_k. Valid iff [pi, pi] = 0.
ChartPtr make_poisson_cotangent(int d, const std::map<std::pair<int, int>, Poly>& pi) {
  auto chart = std::make_shared<Chart>(d, d);
  auto entry = [&](int a, int b) -> Poly {
    if (a == b) return Poly(d);
    auto it = pi.find(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    if (it == pi.end()) return Poly(d);
    return a < b ? it->second : -it->second;
  };
  for (int i = 1; i <= d; ++i)
    for (int a = 1; a <= d; ++a) chart->set_anchor(i, a, entry(i, a));
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      Poly pij = entry(i, j);
      for (int k = 1; k <= d; ++k) chart->set_structure(i, j, k, pij.partial(k));
    }
  auto report = validate_chart(*chart);
  if (!report.empty())
    throw ChartError("poisson_cotangent: bivector is not Poisson", std::move(report));
  return chart;
}

bool parse_parametrized(const std::string& name, const std::string& head, std::string& args) {
  if (name.compare(0, head.size(), head) != 0) return false;
  std::string rest = name.substr(head.size());
  if (rest.empty()) return false;
  if (rest.front() == '(') {
    if (rest.back() != ')') throw ChartError("malformed chart name: " + name);
    args = rest.substr(1, rest.size() - 2);
    return true;
  }
  if (rest.find_first_not_of("0123456789") == std::string::npos) {
    args = rest;
    return true;
  }
  return false;
}

int parse_count(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used != text.size() || v < 1 || v > 16) throw std::invalid_argument("range");
    return v;
  } catch (const std::exception&) {
    throw ChartError("invalid " + what + ": '" + text + "'");
  }
}

}  // namespace

ChartPtr builtin_chart(const std::string& name) {
  std::string args;
  if (name == "so3") return make_so3();
  if (name == "sl2") return make_sl2();
  if (name == "heisenberg") return make_heisenberg();
  if (name == "foliation2in3") return make_foliation2in3();
  if (parse_parametrized(name, "tangent", args)) return make_tangent(parse_count(args, "dimension"));
  if (parse_parametrized(name, "abelian", args)) return make_abelian(parse_count(args, "rank"));
  if (parse_parametrized(name, "poisson_cotangent", args)) {
    auto sep = args.find(';');
    if (sep == std::string::npos)
      throw ChartError("poisson_cotangent expects 'poisson_cotangent(<d>;<bivector>)'");
    int d = parse_count(args.substr(0, sep), "dimension");
    std::map<std::pair<int, int>, Poly> pi;
    for (auto& term : detail::parse_graded_expr(args.substr(sep + 1), d, "e", false)) {
      if (term.indices.size() != 2)
        throw ChartError("poisson_cotangent bivector terms must have exactly two e-factors");
      int a = term.indices[0], b = term.indices[1];
      if (a == b) continue;
      if (a > b) {
        std::swap(a, b);
        term.coeff = -term.coeff;
      }
      if (a < 1 || b > d) throw ChartError("bivector index out of range");
      auto [it, inserted] = pi.emplace(std::make_pair(a, b), term.coeff);
      if (!inserted) it->second += term.coeff;
    }
    return make_poisson_cotangent(d, pi);
  }
  throw ChartError("unknown builtin chart: '" + name + "'");
}

std::vector<std::string> builtin_chart_names() {
  return {"tangent(d)", "abelian(r)", "so3",
          "sl2",        "heisenberg", "foliation2in3",
          "poisson_cotangent(d;bivector)"};
}

namespace {

struct Line {
  int number;
  std::vector<std::string> fields;
  std::string rhs;
};

std::vector<Line> tokenize_file(std::istream& in, const std::string& filename) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string head = raw, rhs;
    // The header line carries '=' inside its d=/r= tokens; only entry lines
    // split at '='.
    std::istringstream probe(raw);
    std::string kind;
    probe >> kind;
    auto eq = raw.find('=');
    if (kind != "chart" && eq != std::string::npos) {
      head = raw.substr(0, eq);
      rhs = raw.substr(eq + 1);
    }
    std::istringstream fields(head);
    Line line{number, {}, rhs};
    std::string tok;
    while (fields >> tok) line.fields.push_back(tok);
    if (line.fields.empty()) continue;
    lines.push_back(std::move(line));
  }
  (void)filename;
  return lines;
}

[[noreturn]] void file_fail(const std::string& filename, int line, const std::string& message) {
  throw ChartError(filename + ":" + std::to_string(line) + ": " + message);
}

int field_int(const std::string& filename, const Line& line, std::size_t idx) {
  try {
    return std::stoi(line.fields.at(idx));
  } catch (const std::exception&) {
    file_fail(filename, line.number, "expected integer index");
  }
}

}  // namespace

ChartFile parse_chart_file(std::istream& in, const std::string& filename) {
  auto lines = tokenize_file(in, filename);
  if (lines.empty()) throw ChartError(filename + ": empty chart file");
  const Line& header = lines.front();
  int d = -1, r = -1;
  if (header.fields.size() == 3 && header.fields[0] == "chart") {
    for (std::size_t k = 1; k <= 2; ++k) {
      const std::string& f = header.fields[k];
      if (f.compare(0, 2, "d=") == 0) d = std::stoi(f.substr(2));
      else if (f.compare(0, 2, "r=") == 0) r = std::stoi(f.substr(2));
    }
  }
  if (d < 0 || r < 1)
    file_fail(filename, header.number, "expected header 'chart d=<int> r=<int>'");

  auto chart = std::make_shared<Chart>(d, r);
  ChartFile out;
  auto parse_rhs = [&](const Line& line) -> Poly {
    try {
      return parse_poly(line.rhs, d);
    } catch (const ParseError& e) {
      file_fail(filename, line.number, e.what());
    }
  };

  for (std::size_t n = 1; n < lines.size(); ++n) {
    const Line& line = lines[n];
    const std::string& kind = line.fields[0];
    try {
      if (kind == "rho" && line.fields.size() == 3) {
        chart->set_anchor(field_int(filename, line, 1), field_int(filename, line, 2),
                          parse_rhs(line));
      } else if (kind == "c" && line.fields.size() == 4) {
        chart->set_structure(field_int(filename, line, 1), field_int(filename, line, 2),
                             field_int(filename, line, 3), parse_rhs(line));
      } else if (kind == "gamma" && line.fields.size() == 4) {
        out.gamma[{field_int(filename, line, 1), field_int(filename, line, 2),
                   field_int(filename, line, 3)}] = parse_rhs(line);
      } else if (kind == "lambda" && line.fields.size() == 3) {
        int i = field_int(filename, line, 1), j = field_int(filename, line, 2);
        if (i >= j) file_fail(filename, line.number, "lambda entries require i < j");
        out.lambda[{i, j}] = parse_rhs(line);
      } else {
        file_fail(filename, line.number, "unrecognized line '" + kind + "'");
      }
    } catch (const ChartError&) {
      throw;
    } catch (const std::exception& e) {
      file_fail(filename, line.number, e.what());
    }
  }
  out.chart = chart;
  return out;
}

ChartFile load_chart_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ChartError("cannot open chart file: " + path);
  return parse_chart_file(in, path);
}

std::string write_chart_file(const Chart& chart) {
  std::ostringstream os;
  os << "chart d=" << chart.base_dim() << " r=" << chart.rank() << "\n";
  for (int i = 1; i <= chart.rank(); ++i)
    for (int a = 1; a <= chart.base_dim(); ++a)
      if (!chart.anchor(i, a).is_zero())
        os << "rho " << i << " " << a << " = " << chart.anchor(i, a) << "\n";
  for (const auto& [key, c] : chart.structure_terms())
    os << "c " << key[0] << " " << key[1] << " " << key[2] << " = " << c << "\n";
  return os.str();
}

}  // namespace algebroid
