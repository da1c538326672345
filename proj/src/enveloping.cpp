#include "algebroid/enveloping.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "algebroid/linalg.hpp"
#include "graded_expr.hpp"

namespace algebroid {

UEElement::UEElement(ChartPtr chart, const Poly& scalar) : chart_(std::move(chart)) {
  add_term({}, scalar);
}

UEElement UEElement::one(ChartPtr chart) {
  Poly p = chart->one();
  return UEElement(std::move(chart), p);
}

UEElement UEElement::generator(ChartPtr chart, int i) {
  UEElement u(chart);
  if (i < 1 || i > u.chart_->rank()) throw std::out_of_range("generator index out of range");
  u.add_term({i}, u.chart_->one());
  return u;
}

void UEElement::add_term(const PBWMonomial& monomial, const Poly& coeff) {
  if (!std::is_sorted(monomial.begin(), monomial.end()))
    throw std::invalid_argument("PBW monomial must be non-decreasing");
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.emplace(monomial, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int UEElement::order() const {
  int n = -1;
  for (const auto& [m, c] : terms_) n = std::max(n, static_cast<int>(m.size()));
  return n;
}

UEElement UEElement::operator-() const {
  UEElement r(chart_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

UEElement& UEElement::operator+=(const UEElement& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

UEElement& UEElement::operator-=(const UEElement& o) {
  require_same_chart(chart_, o.chart_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

UEElement UEElement::operator*(const Rational& c) const {
  UEElement r(chart_);
  if (c.is_zero()) return r;
  for (const auto& [m, cc] : terms_) r.terms_.emplace(m, cc * c);
  return r;
}

UEElement UEElement::operator*(const Poly& f) const {
  UEElement r(chart_);
  for (const auto& [m, cc] : terms_) r.add_term(m, cc * f);
  return r;
}

std::string UEElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c << ")";
    for (int idx : m) os << "*e" << idx;
    first = false;
  }
  return os.str();
}

namespace {

using TermSum = std::map<PBWMonomial, Poly>;

void accumulate(TermSum& sum, const PBWMonomial& m, const Poly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = sum.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) sum.erase(it);
  }
}

// M . g as a left-coefficient sum: moving the function g through the
// monomial produces anchor-derivative tails on subwords.
TermSum shift_scalar(const Chart& chart, const PBWMonomial& m, const Poly& g) {
  TermSum out;
  if (g.is_zero()) return out;
  if (m.empty()) {
    out.emplace(m, g);
    return out;
  }
  PBWMonomial head(m.begin(), m.end() - 1);
  int last = m.back();
  for (const auto& [p, h] : shift_scalar(chart, head, g)) {
    PBWMonomial q = p;
    q.push_back(last);  // subwords of head end at values <= last
    accumulate(out, q, h);
  }
  for (const auto& [p, h] : shift_scalar(chart, head, chart.anchor_apply(last, g)))
    accumulate(out, p, h);
  return out;
}

// M . e_j normal ordered. The rewrite e_m e_j = e_j e_m + c_{mj}^k e_k is
// applied recursively; termination follows the (length, inversions) measure.
TermSum mul_gen(const Chart& chart, const PBWMonomial& m, int j) {
  TermSum out;
  if (m.empty() || m.back() <= j) {
    PBWMonomial q = m;
    q.push_back(j);
    out.emplace(std::move(q), chart.one());
    return out;
  }
  PBWMonomial head(m.begin(), m.end() - 1);
  int last = m.back();
  for (const auto& [p, h] : mul_gen(chart, head, j))
    for (const auto& [q, h2] : mul_gen(chart, p, last)) accumulate(out, q, h * h2);
  for (int k = 1; k <= chart.rank(); ++k) {
    Poly c = chart.structure(last, j, k);
    if (c.is_zero()) continue;
    for (const auto& [p, h] : shift_scalar(chart, head, c))
      for (const auto& [q, h2] : mul_gen(chart, p, k)) accumulate(out, q, h * h2);
  }
  return out;
}

}  // namespace

UEElement ue_mul(const UEElement& a, const UEElement& b) {
  require_same_chart(a.chart(), b.chart());
  const Chart& chart = *a.chart();
  UEElement out(a.chart());
  for (const auto& [m, f] : a.terms()) {
    for (const auto& [n, g] : b.terms()) {
      TermSum cur = shift_scalar(chart, m, g);
      for (int j : n) {
        TermSum next;
        for (const auto& [p, h] : cur)
          for (const auto& [q, h2] : mul_gen(chart, p, j)) accumulate(next, q, h * h2);
        cur = std::move(next);
      }
      for (const auto& [p, h] : cur) out.add_term(p, f * h);
    }
  }
  return out;
}

Poly counit(const UEElement& a) {
  auto it = a.terms().find(PBWMonomial{});
  return it == a.terms().end() ? a.chart()->zero() : it->second;
}

Poly ue_action(const UEElement& u, const Poly& f) {
  const Chart& chart = *u.chart();
  Poly out(chart.base_dim());
  for (const auto& [m, c] : u.terms()) {
    Poly g = f;
    for (auto it = m.rbegin(); it != m.rend(); ++it) g = chart.anchor_apply(*it, g);
    out += c * g;
  }
  return out;
}

PolyDiffOp::PolyDiffOp(ChartPtr chart, int arity) : chart_(std::move(chart)), arity_(arity) {
  if (arity < -1) throw std::invalid_argument("arity must be >= -1");
}

PolyDiffOp PolyDiffOp::from_function(ChartPtr chart, const Poly& f) {
  PolyDiffOp p(std::move(chart), -1);
  p.add_term({}, f);
  return p;
}

PolyDiffOp PolyDiffOp::from_ue(const UEElement& u) {
  PolyDiffOp p(u.chart(), 0);
  for (const auto& [m, c] : u.terms()) p.add_term({m}, c);
  return p;
}

PolyDiffOp PolyDiffOp::tensor(ChartPtr chart, const std::vector<UEElement>& slots) {
  if (slots.empty()) throw std::invalid_argument("tensor needs at least one slot");
  PolyDiffOp out(chart, static_cast<int>(slots.size()) - 1);
  // The tensor product is balanced over the base functions acting from the
  // left on every factor, so each slot coefficient migrates out front
  // without crossing any monomial.
  std::vector<std::pair<std::vector<PBWMonomial>, Poly>> partial;
  partial.push_back({{}, chart->one()});
  for (const auto& slot : slots) {
    std::vector<std::pair<std::vector<PBWMonomial>, Poly>> next;
    for (const auto& [tuple, coeff] : partial) {
      for (const auto& [m, f] : slot.terms()) {
        auto key = tuple;
        key.push_back(m);
        next.push_back({std::move(key), coeff * f});
      }
    }
    partial = std::move(next);
  }
  for (const auto& [tuple, coeff] : partial) out.add_term(tuple, coeff);
  return out;
}

PolyDiffOp PolyDiffOp::m0(ChartPtr chart) {
  PolyDiffOp p(chart, 1);
  p.add_term({PBWMonomial{}, PBWMonomial{}}, chart->one());
  return p;
}

void PolyDiffOp::add_term(const std::vector<PBWMonomial>& monomials, const Poly& coeff) {
  if (static_cast<int>(monomials.size()) != arity_ + 1)
    throw std::invalid_argument("tensor slot count does not match arity");
  for (const auto& m : monomials)
    if (!std::is_sorted(m.begin(), m.end()))
      throw std::invalid_argument("PBW monomial must be non-decreasing");
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.emplace(monomials, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int PolyDiffOp::order() const {
  int n = -1;
  for (const auto& [t, c] : terms_) {
    int total = 0;
    for (const auto& m : t) total += static_cast<int>(m.size());
    n = std::max(n, total);
  }
  return n;
}

PolyDiffOp PolyDiffOp::operator-() const {
  PolyDiffOp r(chart_, arity_);
  for (const auto& [t, c] : terms_) r.terms_.emplace(t, -c);
  return r;
}

PolyDiffOp& PolyDiffOp::operator+=(const PolyDiffOp& o) {
  require_same_chart(chart_, o.chart_);
  if (arity_ != o.arity_) throw std::invalid_argument("operator arity mismatch");
  for (const auto& [t, c] : o.terms_) add_term(t, c);
  return *this;
}

PolyDiffOp& PolyDiffOp::operator-=(const PolyDiffOp& o) {
  require_same_chart(chart_, o.chart_);
  if (arity_ != o.arity_) throw std::invalid_argument("operator arity mismatch");
  for (const auto& [t, c] : o.terms_) add_term(t, -c);
  return *this;
}

PolyDiffOp PolyDiffOp::operator*(const Rational& c) const {
  PolyDiffOp r(chart_, arity_);
  if (c.is_zero()) return r;
  for (const auto& [t, cc] : terms_) r.terms_.emplace(t, cc * c);
  return r;
}

PolyDiffOp PolyDiffOp::operator*(const Poly& f) const {
  PolyDiffOp r(chart_, arity_);
  for (const auto& [t, cc] : terms_) r.add_term(t, cc * f);
  return r;
}

std::string PolyDiffOp::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c << ")";
    for (std::size_t s = 0; s < t.size(); ++s) {
      os << (s == 0 ? "*" : "|");
      if (t[s].empty()) {
        os << "1";
      } else {
        for (std::size_t g = 0; g < t[s].size(); ++g) os << (g == 0 ? "" : "*") << "e" << t[s][g];
      }
    }
    first = false;
  }
  return os.str();
}

namespace {

// All ways to distribute a sorted monomial into `parts` ordered sorted
// monomials, with shuffle multiplicities (binomials per repeated value).
std::vector<std::pair<std::vector<PBWMonomial>, Rational>> multi_split(const PBWMonomial& m,
                                                                       int parts) {
  std::vector<std::pair<std::vector<PBWMonomial>, Rational>> out;
  if (parts == 0) {
    if (m.empty()) out.push_back({{}, Rational(1)});
    return out;
  }
  // group into runs of equal generators
  std::vector<std::pair<int, int>> runs;
  for (int v : m) {
    if (!runs.empty() && runs.back().first == v)
      runs.back().second += 1;
    else
      runs.push_back({v, 1});
  }
  std::vector<PBWMonomial> current(parts);
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t run, Rational coeff) {
    if (run == runs.size()) {
      out.push_back({current, coeff});
      return;
    }
    auto [value, count] = runs[run];
    // distribute `count` copies among `parts` slots
    std::vector<int> alloc(parts, 0);
    std::function<void(int, int, Rational)> place = [&](int slot, int remaining, Rational mult) {
      if (slot == parts - 1) {
        alloc[slot] = remaining;
        // multinomial count!/(prod alloc!) accumulated as binomials
        Rational ways(1);
        int left = count;
        for (int s = 0; s < parts; ++s) {
          // C(left, alloc[s])
          for (int x = 0; x < alloc[s]; ++x) {
            ways *= Rational(left - x);
            ways /= Rational(x + 1);
          }
          left -= alloc[s];
        }
        for (int s = 0; s < parts; ++s)
          for (int x = 0; x < alloc[s]; ++x) current[s].push_back(value);
        rec(run + 1, coeff * mult * ways);
        for (int s = 0; s < parts; ++s)
          for (int x = 0; x < alloc[s]; ++x) current[s].pop_back();
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        alloc[slot] = take;
        place(slot + 1, remaining - take, mult);
      }
      alloc[slot] = 0;
    };
    place(0, count, Rational(1));
  };
  rec(0, Rational(1));
  return out;
}

}  // namespace

PolyDiffOp coproduct(const UEElement& a) {
  PolyDiffOp out(a.chart(), 1);
  for (const auto& [m, c] : a.terms())
    for (const auto& [parts, mult] : multi_split(m, 2)) out.add_term(parts, c * mult);
  return out;
}

PolyDiffOp coproduct_slot(const PolyDiffOp& p, int slot) {
  if (slot < 0 || slot > p.arity()) throw std::out_of_range("slot out of range");
  PolyDiffOp out(p.chart(), p.arity() + 1);
  for (const auto& [t, c] : p.terms()) {
    for (const auto& [parts, mult] : multi_split(t[slot], 2)) {
      std::vector<PBWMonomial> key;
      key.reserve(t.size() + 1);
      key.insert(key.end(), t.begin(), t.begin() + slot);
      key.push_back(parts[0]);
      key.push_back(parts[1]);
      key.insert(key.end(), t.begin() + slot + 1, t.end());
      out.add_term(key, c * mult);
    }
  }
  return out;
}

PolyDiffOp counit_slot(const PolyDiffOp& p, int slot) {
  if (slot < 0 || slot > p.arity()) throw std::out_of_range("slot out of range");
  PolyDiffOp out(p.chart(), p.arity() - 1);
  for (const auto& [t, c] : p.terms()) {
    if (!t[slot].empty()) continue;
    std::vector<PBWMonomial> key;
    key.reserve(t.size() - 1);
    key.insert(key.end(), t.begin(), t.begin() + slot);
    key.insert(key.end(), t.begin() + slot + 1, t.end());
    out.add_term(key, c);
  }
  return out;
}

PolyDiffOp flip12(const PolyDiffOp& p) {
  if (p.arity() != 1) throw std::invalid_argument("flip12 expects arity 1");
  PolyDiffOp out(p.chart(), 1);
  for (const auto& [t, c] : p.terms()) out.add_term({t[1], t[0]}, c);
  return out;
}

PolyDiffOp diffop_mul(const PolyDiffOp& a, const PolyDiffOp& b) {
  return diffop_mul_at(a, b, 0);
}

PolyDiffOp diffop_mul_at(const PolyDiffOp& a, const PolyDiffOp& b, int coeff_slot) {
  require_same_chart(a.chart(), b.chart());
  if (a.arity() != b.arity()) throw std::invalid_argument("diffop_mul arity mismatch");
  if (coeff_slot < 0 || (a.arity() >= 0 && coeff_slot > a.arity()))
    throw std::out_of_range("coefficient slot out of range");
  const ChartPtr& chart = a.chart();
  if (a.arity() == -1) {
    PolyDiffOp out(chart, -1);
    for (const auto& [s, f] : a.terms())
      for (const auto& [t, g] : b.terms()) out.add_term({}, f * g);
    return out;
  }
  PolyDiffOp out(chart, a.arity());
  for (const auto& [s, f] : a.terms()) {
    for (const auto& [t, g] : b.terms()) {
      std::vector<UEElement> slots;
      slots.reserve(s.size());
      for (std::size_t k = 0; k < s.size(); ++k) {
        UEElement left(chart);
        left.add_term(s[k], chart->one());
        UEElement right(chart);
        right.add_term(t[k], static_cast<int>(k) == coeff_slot ? g : chart->one());
        slots.push_back(ue_mul(left, right));
      }
      out += PolyDiffOp::tensor(chart, slots) * f;
    }
  }
  return out;
}

PolyDiffOp bullet(const PolyDiffOp& p1, const PolyDiffOp& p2) {
  require_same_chart(p1.chart(), p2.chart());
  const ChartPtr& chart = p1.chart();
  const int k1 = p1.arity();
  const int k2 = p2.arity();
  PolyDiffOp out(chart, k1 + k2);
  if (k1 == -1) return out;  // no slots to substitute into

  for (const auto& [t1, f] : p1.terms()) {
    for (int i = 0; i <= k1; ++i) {
      Rational sign(pow_sign(static_cast<long>(i) * k2));

      if (k2 == -1) {
        // Slot i collapses against the function operand: the slot content
        // acts on it through the anchor and the resulting function joins
        // the left coefficient.
        for (const auto& [t2, g] : p2.terms()) {
          (void)t2;
          UEElement mono(chart);
          mono.add_term(t1[i], chart->one());
          Poly h = ue_action(mono, g);
          if (h.is_zero()) continue;
          std::vector<PBWMonomial> key;
          key.reserve(k1);
          for (int s = 0; s <= k1; ++s)
            if (s != i) key.push_back(t1[s]);
          PolyDiffOp term(chart, k1 - 1);
          term.add_term(key, f * h * sign);
          out += term;
        }
        continue;
      }

      for (const auto& [parts, mult] : multi_split(t1[i], k2 + 1)) {
        for (const auto& [t2, g] : p2.terms()) {
          std::vector<UEElement> slots;
          slots.reserve(k1 + k2 + 1);
          for (int s = 0; s < i; ++s) {
            UEElement u(chart);
            u.add_term(t1[s], chart->one());
            slots.push_back(std::move(u));
          }
          for (int tslot = 0; tslot <= k2; ++tslot) {
            UEElement left(chart);
            left.add_term(parts[tslot], chart->one());
            UEElement right(chart);
            right.add_term(t2[tslot], tslot == 0 ? g : chart->one());
            slots.push_back(ue_mul(left, right));
          }
          for (int s = i + 1; s <= k1; ++s) {
            UEElement u(chart);
            u.add_term(t1[s], chart->one());
            slots.push_back(std::move(u));
          }
          out += PolyDiffOp::tensor(chart, slots) * (f * mult) * sign;
        }
      }
    }
  }
  return out;
}

PolyDiffOp gerstenhaber_bracket(const PolyDiffOp& p1, const PolyDiffOp& p2) {
  PolyDiffOp left = bullet(p1, p2);
  PolyDiffOp right = bullet(p2, p1);
  long k1 = p1.arity(), k2 = p2.arity();
  return left - right * Rational(pow_sign(k1 * k2));
}

PolyDiffOp hochschild_d(const PolyDiffOp& p) {
  return gerstenhaber_bracket(PolyDiffOp::m0(p.chart()), p);
}

PolyDiffOp hkr(const PolyVector& v) {
  const ChartPtr& chart = v.chart();
  if (v.is_zero()) return PolyDiffOp(chart, -1);
  int k = v.top_degree();
  if (!v.is_homogeneous(k))
    throw std::invalid_argument("hkr expects a homogeneous polyvector");
  if (k == -1) {
    PolyDiffOp out(chart, -1);
    for (const auto& [t, c] : v.terms()) out.add_term({}, c);
    return out;
  }
  PolyDiffOp out(chart, k);
  Rational factorial(1);
  for (int s = 2; s <= k + 1; ++s) factorial *= Rational(s);
  for (const auto& [tuple, c] : v.terms()) {
    std::vector<int> perm(tuple.size());
    for (std::size_t s = 0; s < perm.size(); ++s) perm[s] = static_cast<int>(s);
    do {
      int inversions = 0;
      for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
          if (perm[a] > perm[b]) ++inversions;
      std::vector<PBWMonomial> key;
      key.reserve(tuple.size());
      for (std::size_t s = 0; s < perm.size(); ++s) key.push_back({tuple[perm[s]]});
      out.add_term(key, c * (Rational(pow_sign(inversions)) / factorial));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

namespace {

void enumerate_monomials(int rank, int max_len, PBWMonomial& cur, int min_gen,
                         std::vector<PBWMonomial>& out) {
  out.push_back(cur);
  if (static_cast<int>(cur.size()) == max_len) return;
  for (int g = min_gen; g <= rank; ++g) {
    cur.push_back(g);
    enumerate_monomials(rank, max_len, cur, g, out);
    cur.pop_back();
  }
}

std::vector<PBWMonomial> monomials_up_to(int rank, int max_len) {
  std::vector<PBWMonomial> out;
  PBWMonomial cur;
  enumerate_monomials(rank, max_len, cur, 1, out);
  return out;
}

std::vector<std::vector<PBWMonomial>> window_basis(int rank, int arity, int max_order) {
  std::vector<std::vector<PBWMonomial>> out;
  if (arity == -1) {
    out.push_back({});
    return out;
  }
  std::vector<PBWMonomial> singles = monomials_up_to(rank, max_order);
  std::vector<PBWMonomial> cur;
  std::function<void(int, int)> rec = [&](int slot, int budget) {
    if (slot == arity + 1) {
      out.push_back(cur);
      return;
    }
    for (const auto& m : singles) {
      if (static_cast<int>(m.size()) > budget) continue;
      cur.push_back(m);
      rec(slot + 1, budget - static_cast<int>(m.size()));
      cur.pop_back();
    }
  };
  rec(0, max_order);
  return out;
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long v = 1;
  for (int x = 0; x < k; ++x) v = v * (n - x) / (x + 1);
  return v;
}

}  // namespace

std::vector<CohomologyWindow> truncated_cohomology(const ChartPtr& chart, int max_arity,
                                                   int max_order, std::size_t dimension_cap) {
  if (chart->base_dim() != 0)
    throw std::invalid_argument("truncated_cohomology is defined over a point (d = 0)");
  const int r = chart->rank();

  // Window bases for arities -1 .. max_arity + 1.
  std::map<int, std::vector<std::vector<PBWMonomial>>> basis;
  std::map<int, std::map<std::vector<PBWMonomial>, std::size_t>> index;
  for (int k = -1; k <= max_arity + 1; ++k) {
    basis[k] = window_basis(r, k, max_order);
    if (basis[k].size() > dimension_cap)
      throw std::length_error("cohomology window exceeds the dimension cap");
    for (std::size_t n = 0; n < basis[k].size(); ++n) index[k][basis[k][n]] = n;
  }

  auto element_of = [&](int arity, const std::vector<PBWMonomial>& key) {
    PolyDiffOp p(chart, arity);
    p.add_term(key, chart->one());
    return p;
  };

  auto expand = [&](const PolyDiffOp& p, int arity, std::vector<Rational>& column) {
    for (const auto& [t, c] : p.terms()) {
      auto it = index[arity].find(t);
      if (it == index[arity].end())
        throw std::logic_error("differential left the filtration window");
      column[it->second] += c.constant_term();
    }
  };

  // Matrices of the differential D^k -> D^{k+1} on the windows.
  std::map<int, QMatrix> matrices;
  for (int k = -1; k <= max_arity; ++k) {
    QMatrix mat(basis[k + 1].size(), basis[k].size());
    for (std::size_t col = 0; col < basis[k].size(); ++col) {
      PolyDiffOp image = hochschild_d(element_of(k, basis[k][col]));
      std::vector<Rational> column(basis[k + 1].size());
      expand(image, k + 1, column);
      for (std::size_t row = 0; row < column.size(); ++row) mat.at(row, col) = column[row];
    }
    matrices.emplace(k, std::move(mat));
  }

  std::vector<CohomologyWindow> report;
  for (int k = -1; k <= max_arity; ++k) {
    CohomologyWindow win;
    win.arity = k;
    win.dim = basis[k].size();
    std::size_t rank_out = matrices.at(k).rank();
    win.ker = win.dim - rank_out;
    win.im = k == -1 ? 0 : matrices.at(k - 1).rank();
    win.detected = static_cast<long>(win.ker) - static_cast<long>(win.im);
    win.wedge_dim = binomial(r, k + 1);

    // hkr classes: independent cocycles spanning the detected cohomology.
    std::vector<std::vector<Rational>> hkr_vectors;
    bool closed = true;
    if (k + 1 <= max_order) {
      IndexTuple wedge_tuple;
      std::function<void(int)> build = [&](int min_gen) {
        if (static_cast<int>(wedge_tuple.size()) == k + 1) {
          PolyVector v(chart);
          v.add_term(wedge_tuple, chart->one());
          PolyDiffOp image = hkr(v);
          if (!hochschild_d(image).is_zero()) closed = false;
          std::vector<Rational> column(basis[k].size());
          expand(image, k, column);
          hkr_vectors.push_back(std::move(column));
          return;
        }
        for (int g = min_gen; g <= r; ++g) {
          wedge_tuple.push_back(g);
          build(g + 1);
          wedge_tuple.pop_back();
        }
      };
      if (k >= 0) build(1);
      else hkr_vectors.push_back(std::vector<Rational>(1, Rational(1)));
    }

    std::size_t im_rank = win.im;
    QMatrix joint(basis[k].size(), (k >= 0 ? basis[k - 1].size() : 0) + hkr_vectors.size());
    if (k >= 0) {
      const QMatrix& prev = matrices.at(k - 1);
      for (std::size_t row = 0; row < basis[k].size(); ++row)
        for (std::size_t col = 0; col < basis[k - 1].size(); ++col)
          joint.at(row, col) = prev.at(row, col);
    }
    for (std::size_t h = 0; h < hkr_vectors.size(); ++h)
      for (std::size_t row = 0; row < basis[k].size(); ++row)
        joint.at(row, (k >= 0 ? basis[k - 1].size() : 0) + h) = hkr_vectors[h][row];
    std::size_t joint_rank = joint.rank();
    win.hkr_spans = closed && joint_rank == im_rank + static_cast<std::size_t>(win.wedge_dim) &&
                    static_cast<long>(hkr_vectors.size()) == win.wedge_dim;
    report.push_back(win);
  }
  return report;
}

UEElement parse_ue(const std::string& text, const ChartPtr& chart) {
  UEElement out(chart);
  for (const auto& term : detail::parse_graded_expr(text, chart->base_dim(), "e", true)) {
    UEElement cur = UEElement::one(chart);
    for (int idx : term.indices) cur = ue_mul(cur, UEElement::generator(chart, idx));
    out += cur * term.coeff;
  }
  return out;
}

PolyDiffOp parse_polydiffop(const std::string& text, const ChartPtr& chart) {
  // split into top-level +/- chunks first, then '|' slots inside each chunk
  std::vector<std::pair<int, std::string>> chunks;
  int depth = 0;
  std::size_t start = 0;
  int sign = 1;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] == '(') ++depth;
    if (i < text.size() && text[i] == ')') --depth;
    bool split = i == text.size();
    int next_sign = 1;
    if (!split && depth == 0 && (text[i] == '+' || text[i] == '-') && i > start) {
      // not a leading sign inside the chunk
      std::string sofar = text.substr(start, i - start);
      if (sofar.find_first_not_of(" \t") != std::string::npos) {
        split = true;
        next_sign = text[i] == '-' ? -1 : 1;
      }
    }
    if (split) {
      std::string chunk = text.substr(start, i - start);
      if (chunk.find_first_not_of(" \t") != std::string::npos) chunks.push_back({sign, chunk});
      sign = next_sign;
      start = i + 1;
    }
  }
  if (chunks.empty()) throw ParseError("empty tensor expression", 0);

  PolyDiffOp out;
  bool have = false;
  for (const auto& [s, chunk] : chunks) {
    std::vector<UEElement> slots;
    for (const auto& slot_text : detail::split_tensor_slots(chunk))
      slots.push_back(parse_ue(slot_text, chart));
    PolyDiffOp part = PolyDiffOp::tensor(chart, slots) * Rational(s);
    if (!have) {
      out = part;
      have = true;
    } else {
      out += part;
    }
  }
  return out;
}

}  // namespace algebroid
