#include "algebroid/polyvector.hpp"

#include <ostream>
#include <sstream>

#include "graded_expr.hpp"

namespace algebroid {

PolyVector::PolyVector(ChartPtr chart, const Poly& function) : chart_(std::move(chart)) {
  add_term({}, function);
}

PolyVector PolyVector::generator(ChartPtr chart, int i) {
  PolyVector v(chart);
  v.add_term({i}, v.chart_->one());
  return v;
}

void PolyVector::add_term(IndexTuple tuple, const Poly& coeff) {
  if (coeff.is_zero()) return;
  int sign = sort_tuple(tuple);
  if (sign == 0) return;
  for (int idx : tuple)
    if (idx < 1 || idx > chart_->rank()) throw std::out_of_range("generator index out of range");
  Poly value = sign == 1 ? coeff : -coeff;
  auto [it, inserted] = terms_.emplace(std::move(tuple), value);
  if (!inserted) {
    it->second += value;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

PolyVector PolyVector::component(int k) const {
  PolyVector r(chart_);
  for (const auto& [t, c] : terms_)
    if (static_cast<int>(t.size()) == k + 1) r.terms_.emplace(t, c);
  return r;
}

int PolyVector::top_degree() const {
  int deg = -2;
  for (const auto& [t, c] : terms_) deg = std::max(deg, static_cast<int>(t.size()) - 1);
  return deg;
}

bool PolyVector::is_homogeneous(int k) const {
  for (const auto& [t, c] : terms_)
    if (static_cast<int>(t.size()) != k + 1) return false;
  return true;
}

PolyVector PolyVector::operator-() const {
  PolyVector r(chart_);
  for (const auto& [t, c] : terms_) r.terms_.emplace(t, -c);
  return r;
}

PolyVector& PolyVector::operator+=(const PolyVector& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [t, c] : o.terms_) add_term(t, c);
  return *this;
}

PolyVector& PolyVector::operator-=(const PolyVector& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [t, c] : o.terms_) add_term(t, -c);
  return *this;
}

PolyVector PolyVector::operator*(const Rational& c) const {
  PolyVector r(chart_);
  if (c.is_zero()) return r;
  for (const auto& [t, cc] : terms_) r.terms_.emplace(t, cc * c);
  return r;
}

PolyVector PolyVector::operator*(const Poly& f) const {
  PolyVector r(chart_);
  for (const auto& [t, cc] : terms_) r.add_term(t, cc * f);
  return r;
}

std::string PolyVector::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c << ")";
    for (std::size_t s = 0; s < t.size(); ++s) os << (s == 0 ? " * " : "^") << "e" << t[s];
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const PolyVector& v) { return os << v.str(); }

PolyVector wedge(const PolyVector& u, const PolyVector& v) {
  require_same_chart(u.chart(), v.chart());
  PolyVector r(u.chart());
  for (const auto& [ta, ca] : u.terms()) {
    for (const auto& [tb, cb] : v.terms()) {
      auto merged = wedge_merge(ta, tb);
      if (!merged) continue;
      r.add_term(merged->second, (ca * cb) * Rational(merged->first));
    }
  }
  return r;
}

namespace {

PolyVector single(const ChartPtr& chart, const Poly& coeff, const IndexTuple& tuple) {
  PolyVector v(chart);
  v.add_term(tuple, coeff);
  return v;
}

// Bracket of two monomial terms, reduced through graded antisymmetry and
// the Leibniz rule until it reaches the generator/function base cases.
PolyVector bracket_terms(const ChartPtr& chart, const Poly& f, const IndexTuple& I, const Poly& g,
                         const IndexTuple& J) {
  PolyVector out(chart);
  const int ka = static_cast<int>(I.size()) - 1;
  const int kb = static_cast<int>(J.size()) - 1;

  if (I.empty() && J.empty()) return out;

  if (I.empty()) {
    // [f, B] = -(-1)^{k_f k_B} [B, f] with k_f = -1.
    PolyVector rev = bracket_terms(chart, g, J, f, I);
    return rev * Rational(-pow_sign(kb));
  }

  if (I.size() == 1) {
    int i = I[0];
    if (J.empty()) {
      out.add_term({}, f * chart->anchor_apply(i, g));
      return out;
    }
    if (J.size() == 1) {
      int j = J[0];
      out.add_term({j}, f * chart->anchor_apply(i, g));
      out.add_term({i}, -(g * chart->anchor_apply(j, f)));
      Poly fg = f * g;
      for (int k = 1; k <= chart->rank(); ++k) {
        Poly c = chart->structure(i, j, k);
        if (!c.is_zero()) out.add_term({k}, fg * c);
      }
      return out;
    }
    // Peel the second argument: B = (g e_{j1}) ^ (rest).
    IndexTuple head{J[0]};
    IndexTuple rest(J.begin() + 1, J.end());
    Poly one = chart->one();
    PolyVector part1 = wedge(bracket_terms(chart, f, I, g, head), single(chart, one, rest));
    PolyVector part2 = wedge(single(chart, g, head), bracket_terms(chart, f, I, one, rest));
    return part1 + part2 * Rational(pow_sign(ka));
  }

  // Peel the first argument: A = (f e_{i1}) ^ (rest);
  // [u ^ v, w] = u ^ [v, w] + (-1)^{k_w (k_v + 1)} [u, w] ^ v.
  IndexTuple head{I[0]};
  IndexTuple rest(I.begin() + 1, I.end());
  Poly one = chart->one();
  PolyVector part1 = wedge(single(chart, f, head), bracket_terms(chart, one, rest, g, J));
  PolyVector part2 = wedge(bracket_terms(chart, f, head, g, J), single(chart, one, rest));
  return part1 + part2 * Rational(pow_sign(static_cast<long>(kb) * (static_cast<int>(I.size()) - 1)));
}

}  // namespace

PolyVector schouten_bracket(const PolyVector& u, const PolyVector& v) {
  require_same_chart(u.chart(), v.chart());
  PolyVector out(u.chart());
  for (const auto& [ta, ca] : u.terms())
    for (const auto& [tb, cb] : v.terms()) out += bracket_terms(u.chart(), ca, ta, cb, tb);
  return out;
}

PolyVector parse_polyvector(const std::string& text, const ChartPtr& chart) {
  PolyVector out(chart);
  for (auto& term : detail::parse_graded_expr(text, chart->base_dim(), "e", false))
    out.add_term(term.indices, term.coeff);
  return out;
}

}  // namespace algebroid
