#include "algebroid/fedosov.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace algebroid {

MixedSection::MixedSection(ChartPtr chart, BundleKind kind, int truncation)
    : chart_(std::move(chart)), kind_(kind), truncation_(truncation) {
  if (truncation < 0) throw std::invalid_argument("negative truncation");
}

void MixedSection::add_term(SectionKey key, const Poly& coeff) {
  if (coeff.is_zero()) return;
  const int r = chart_->rank();
  if (static_cast<int>(key.y.size()) != r) throw std::invalid_argument("y exponent length != rank");
  for (int e : key.y)
    if (e < 0) throw std::invalid_argument("negative y exponent");
  if (total(key.y) > truncation_) return;

  int sign = sort_tuple(key.xi);
  if (sign == 0) return;
  for (int idx : key.xi)
    if (idx < 1 || idx > r) throw std::out_of_range("xi index out of range");

  switch (kind_) {
    case BundleKind::W:
      if (!key.tpayload.empty() || !key.dpayload.empty())
        throw std::invalid_argument("W sections carry no payload");
      break;
    case BundleKind::T: {
      if (!key.dpayload.empty()) throw std::invalid_argument("T sections carry no multi-indices");
      int psign = sort_tuple(key.tpayload);
      if (psign == 0) return;
      sign *= psign;
      for (int idx : key.tpayload)
        if (idx < 1 || idx > r) throw std::out_of_range("payload index out of range");
      break;
    }
    case BundleKind::D:
      if (!key.tpayload.empty()) throw std::invalid_argument("D sections carry multi-indices only");
      for (const auto& slot : key.dpayload) {
        if (static_cast<int>(slot.size()) != r)
          throw std::invalid_argument("multi-index length != rank");
        for (int e : slot)
          if (e < 0) throw std::invalid_argument("negative multi-index entry");
      }
      break;
  }

  Poly value = sign == 1 ? coeff : -coeff;
  auto [it, inserted] = terms_.emplace(std::move(key), value);
  if (!inserted) {
    it->second += value;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MixedSection MixedSection::operator-() const {
  MixedSection r(chart_, kind_, truncation_);
  for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
  return r;
}

MixedSection& MixedSection::operator+=(const MixedSection& o) {
  require_same_chart(chart_, o.chart_);
  if (kind_ != o.kind_) throw std::invalid_argument("section kind mismatch");
  if (truncation_ != o.truncation_) throw std::invalid_argument("truncation mismatch");
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

MixedSection& MixedSection::operator-=(const MixedSection& o) {
  require_same_chart(chart_, o.chart_);
  if (kind_ != o.kind_) throw std::invalid_argument("section kind mismatch");
  if (truncation_ != o.truncation_) throw std::invalid_argument("truncation mismatch");
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

MixedSection MixedSection::operator*(const Rational& c) const {
  MixedSection r(chart_, kind_, truncation_);
  if (c.is_zero()) return r;
  for (const auto& [k, cc] : terms_) r.terms_.emplace(k, cc * c);
  return r;
}

MixedSection MixedSection::operator*(const Poly& f) const {
  MixedSection r(chart_, kind_, truncation_);
  for (const auto& [k, cc] : terms_) r.add_term(k, cc * f);
  return r;
}

MixedSection MixedSection::y_component(int m) const {
  MixedSection r(chart_, kind_, truncation_);
  for (const auto& [k, c] : terms_)
    if (total(k.y) == m) r.terms_.emplace(k, c);
  return r;
}

MixedSection MixedSection::truncate_y(int max_degree) const {
  MixedSection r(chart_, kind_, truncation_);
  for (const auto& [k, c] : terms_)
    if (total(k.y) <= max_degree) r.terms_.emplace(k, c);
  return r;
}

int MixedSection::max_y_degree() const {
  int m = -1;
  for (const auto& [k, c] : terms_) m = std::max(m, total(k.y));
  return m;
}

std::string MixedSection::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << " + ";
    os << "(" << c << ")";
    for (int i : k.xi) os << " xi" << i;
    for (std::size_t v = 0; v < k.y.size(); ++v)
      if (k.y[v] > 0) {
        os << " y" << (v + 1);
        if (k.y[v] > 1) os << "^" << k.y[v];
      }
    for (int j : k.tpayload) os << " dy" << j;
    for (const auto& slot : k.dpayload) {
      os << " [";
      bool any = false;
      for (std::size_t v = 0; v < slot.size(); ++v)
        for (int rep = 0; rep < slot[v]; ++rep) {
          os << (any ? "*" : "") << "dy" << (v + 1);
          any = true;
        }
      if (!any) os << "id";
      os << "]";
    }
    first = false;
  }
  return os.str();
}

namespace {

int payload_degree(const SectionKey& k, BundleKind kind) {
  switch (kind) {
    case BundleKind::W: return 0;
    case BundleKind::T: return static_cast<int>(k.tpayload.size()) - 1;
    case BundleKind::D: return static_cast<int>(k.dpayload.size()) - 1;
  }
  return 0;
}

std::vector<int> sub_e(std::vector<int> a, int idx) {
  a[idx] -= 1;
  return a;
}

std::vector<int> add_e(std::vector<int> a, int idx) {
  a[idx] += 1;
  return a;
}

}  // namespace

MixedSection delta(const MixedSection& s) {
  MixedSection out(s.chart(), s.kind(), s.truncation());
  for (const auto& [k, c] : s.terms()) {
    for (std::size_t v = 0; v < k.y.size(); ++v) {
      if (k.y[v] == 0) continue;
      auto merged = wedge_merge({static_cast<int>(v) + 1}, k.xi);
      if (!merged) continue;
      SectionKey key{merged->second, sub_e(k.y, v), k.tpayload, k.dpayload};
      out.add_term(std::move(key), c * Rational(k.y[v] * merged->first));
    }
  }
  return out;
}

MixedSection delta_star(const MixedSection& s) {
  MixedSection out(s.chart(), s.kind(), s.truncation());
  for (const auto& [k, c] : s.terms()) {
    for (std::size_t pos = 0; pos < k.xi.size(); ++pos) {
      auto [sign, rest] = remove_at(k.xi, pos);
      SectionKey key{rest, add_e(k.y, k.xi[pos] - 1), k.tpayload, k.dpayload};
      out.add_term(std::move(key), c * Rational(sign));
    }
  }
  return out;
}

MixedSection kappa(const MixedSection& s) {
  MixedSection out(s.chart(), s.kind(), s.truncation());
  for (const auto& [k, c] : s.terms()) {
    int form = static_cast<int>(k.xi.size());
    int fiber = total(k.y);
    if (form + fiber == 0) continue;
    Rational scale(1, form + fiber);
    for (std::size_t pos = 0; pos < k.xi.size(); ++pos) {
      auto [sign, rest] = remove_at(k.xi, pos);
      SectionKey key{rest, add_e(k.y, k.xi[pos] - 1), k.tpayload, k.dpayload};
      out.add_term(std::move(key), c * (scale * Rational(sign)));
    }
  }
  return out;
}

MixedSection harmonic(const MixedSection& s) {
  MixedSection out(s.chart(), s.kind(), s.truncation());
  for (const auto& [k, c] : s.terms())
    if (k.xi.empty() && total(k.y) == 0) out.add_term(k, c);
  return out;
}

MixedSection w_mul(const MixedSection& a, const MixedSection& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.kind() != BundleKind::W || b.kind() != BundleKind::W)
    throw std::invalid_argument("w_mul expects W sections");
  if (a.truncation() != b.truncation()) throw std::invalid_argument("truncation mismatch");
  MixedSection out(a.chart(), BundleKind::W, a.truncation());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      auto merged = wedge_merge(ka.xi, kb.xi);
      if (!merged) continue;
      SectionKey key{merged->second, exps_add(ka.y, kb.y), {}, {}};
      out.add_term(std::move(key), (ca * cb) * Rational(merged->first));
    }
  }
  return out;
}

namespace {

// ---- fiberwise Schouten-Nijenhuis on T payloads -------------------------

struct FT {
  Poly c;
  std::vector<int> y;
  IndexTuple j;
};

void ft_accumulate(std::vector<FT>& out, FT t) {
  if (t.c.is_zero()) return;
  int sign = sort_tuple(t.j);
  if (sign == 0) return;
  if (sign < 0) t.c = -t.c;
  out.push_back(std::move(t));
}

std::vector<FT> ft_wedge(const std::vector<FT>& a, const std::vector<FT>& b) {
  std::vector<FT> out;
  for (const auto& ta : a)
    for (const auto& tb : b) {
      auto merged = wedge_merge(ta.j, tb.j);
      if (!merged) continue;
      out.push_back(
          {ta.c * tb.c * Rational(merged->first), exps_add(ta.y, tb.y), merged->second});
    }
  return out;
}

std::vector<FT> ft_scale(std::vector<FT> v, const Rational& c) {
  for (auto& t : v) t.c = t.c * c;
  return v;
}

// d(scalar)/dy_j for the scalar part (Poly coefficient times y-monomial)
FT ft_derive(const Poly& c, const std::vector<int>& y, int j) {
  if (y[j - 1] == 0) return {Poly(c.nvars()), y, {}};
  return {c * Rational(y[j - 1]), sub_e(y, j - 1), {}};
}

// Bracket of monomial terms, same recursion as the polyvector module but
// with commuting generators d/dy_j acting on the fiber coordinates.
std::vector<FT> ft_bracket(const FT& t1, const FT& t2) {
  std::vector<FT> out;
  const int ka = static_cast<int>(t1.j.size()) - 1;
  const int kb = static_cast<int>(t2.j.size()) - 1;

  if (t1.j.empty() && t2.j.empty()) return out;

  if (t1.j.empty()) {
    for (auto& t : ft_scale(ft_bracket(t2, t1), Rational(-pow_sign(kb)))) ft_accumulate(out, t);
    return out;
  }

  if (t1.j.size() == 1) {
    int i = t1.j[0];
    if (t2.j.empty()) {
      FT d = ft_derive(t2.c, t2.y, i);
      ft_accumulate(out, {t1.c * d.c, exps_add(t1.y, d.y), {}});
      return out;
    }
    if (t2.j.size() == 1) {
      int j = t2.j[0];
      FT d2 = ft_derive(t2.c, t2.y, i);
      ft_accumulate(out, {t1.c * d2.c, exps_add(t1.y, d2.y), {j}});
      FT d1 = ft_derive(t1.c, t1.y, j);
      ft_accumulate(out, {-(t2.c * d1.c), exps_add(t2.y, d1.y), {i}});
      return out;
    }
    FT head{t2.c, t2.y, {t2.j[0]}};
    FT rest{Poly::constant(t2.c.nvars(), Rational(1)), std::vector<int>(t2.y.size(), 0),
            IndexTuple(t2.j.begin() + 1, t2.j.end())};
    auto part1 = ft_wedge(ft_bracket(t1, head), {rest});
    auto part2 = ft_scale(ft_wedge({head}, ft_bracket(t1, rest)), Rational(pow_sign(ka)));
    for (auto& t : part1) ft_accumulate(out, t);
    for (auto& t : part2) ft_accumulate(out, t);
    return out;
  }

  // [u ^ v, w] = u ^ [v, w] + (-1)^{k_w (k_v + 1)} [u, w] ^ v
  FT head{t1.c, t1.y, {t1.j[0]}};
  FT rest{Poly::constant(t1.c.nvars(), Rational(1)), std::vector<int>(t1.y.size(), 0),
          IndexTuple(t1.j.begin() + 1, t1.j.end())};
  auto part1 = ft_wedge({head}, ft_bracket(rest, t2));
  auto part2 = ft_scale(ft_wedge(ft_bracket(head, t2), {rest}),
                        Rational(pow_sign(static_cast<long>(kb) * (static_cast<int>(t1.j.size()) - 1))));
  std::vector<FT> res;
  for (auto& t : part1) ft_accumulate(res, t);
  for (auto& t : part2) ft_accumulate(res, t);
  return res;
}

// ---- fiberwise composition product on D payloads ------------------------

// all splits alpha = parts_0 + ... + parts_{n-1} with multinomial weights
void alpha_splits(const std::vector<int>& alpha, int nparts,
                  std::vector<std::pair<std::vector<std::vector<int>>, Rational>>& out) {
  std::vector<std::vector<int>> parts(nparts, std::vector<int>(alpha.size(), 0));
  std::function<void(std::size_t, Rational)> by_var = [&](std::size_t v, Rational coeff) {
    if (v == alpha.size()) {
      out.push_back({parts, coeff});
      return;
    }
    std::function<void(int, int, Rational)> place = [&](int slot, int remaining, Rational mult) {
      if (slot == nparts - 1) {
        parts[slot][v] = remaining;
        // multinomial alpha_v! / prod(parts_v!) as iterated binomials
        Rational ways(1);
        int left = alpha[v];
        for (int s = 0; s < nparts; ++s) {
          for (int x = 0; x < parts[s][v]; ++x) {
            ways *= Rational(left - x);
            ways /= Rational(x + 1);
          }
          left -= parts[s][v];
        }
        by_var(v + 1, coeff * mult * ways);
        parts[slot][v] = 0;
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        parts[slot][v] = take;
        place(slot + 1, remaining - take, mult);
      }
      parts[slot][v] = 0;
    };
    place(0, alpha[v], Rational(1));
  };
  by_var(0, Rational(1));
}

// d^gamma(y^a): falling-factorial coefficient, or zero
std::pair<Rational, std::vector<int>> derive_monomial(const std::vector<int>& a,
                                                      const std::vector<int>& gamma) {
  Rational coeff(1);
  std::vector<int> rest = a;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (gamma[v] > a[v]) return {Rational(0), {}};
    for (int x = 0; x < gamma[v]; ++x) coeff *= Rational(a[v] - x);
    rest[v] -= gamma[v];
  }
  return {coeff, rest};
}

struct FD {
  Poly c;
  std::vector<int> y;
  std::vector<std::vector<int>> slots;
};

// P1 o_i P2: substitute P2 into argument i of P1 (higher Leibniz rule).
std::vector<FD> fd_compose_at(const FD& t1, const FD& t2, std::size_t i) {
  std::vector<FD> out;
  int k2 = static_cast<int>(t2.slots.size()) - 1;
  std::vector<std::pair<std::vector<std::vector<int>>, Rational>> splits;
  alpha_splits(t1.slots[i], k2 + 2, splits);
  for (const auto& [parts, mult] : splits) {
    auto [dc, rest] = derive_monomial(t2.y, parts[0]);
    Rational factor = mult * dc;
    if (factor == Rational(0)) continue;
    FD term;
    term.c = t1.c * t2.c * factor;
    term.y = exps_add(t1.y, rest);
    term.slots.reserve(t1.slots.size() + k2);
    for (std::size_t s = 0; s < i; ++s) term.slots.push_back(t1.slots[s]);
    for (int t = 0; t <= k2; ++t) term.slots.push_back(exps_add(t2.slots[t], parts[t + 1]));
    for (std::size_t s = i + 1; s < t1.slots.size(); ++s) term.slots.push_back(t1.slots[s]);
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<FD> fd_bullet(const FD& t1, const FD& t2) {
  std::vector<FD> out;
  int k2 = static_cast<int>(t2.slots.size()) - 1;
  for (std::size_t i = 0; i < t1.slots.size(); ++i) {
    Rational sign(pow_sign(static_cast<long>(i) * k2));
    for (auto& term : fd_compose_at(t1, t2, i)) {
      term.c = term.c * sign;
      out.push_back(std::move(term));
    }
  }
  return out;
}

}  // namespace

MixedSection fiberwise_schouten(const MixedSection& a, const MixedSection& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.kind() != BundleKind::T || b.kind() != BundleKind::T)
    throw std::invalid_argument("fiberwise_schouten expects T sections");
  if (a.truncation() != b.truncation()) throw std::invalid_argument("truncation mismatch");
  MixedSection out(a.chart(), BundleKind::T, a.truncation());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      auto merged = wedge_merge(ka.xi, kb.xi);
      if (!merged) continue;
      int koszul = pow_sign(static_cast<long>(payload_degree(ka, BundleKind::T)) *
                            static_cast<long>(kb.xi.size()));
      Rational pre(koszul * merged->first);
      FT t1{ca, ka.y, ka.tpayload};
      FT t2{cb, kb.y, kb.tpayload};
      for (const auto& t : ft_bracket(t1, t2)) {
        SectionKey key{merged->second, t.y, t.j, {}};
        out.add_term(std::move(key), t.c * pre);
      }
    }
  }
  return out;
}

namespace {

MixedSection fd_pair_bullet(const ChartPtr& chart, int truncation, const SectionKey& ka,
                            const Poly& ca, const SectionKey& kb, const Poly& cb) {
  MixedSection out(chart, BundleKind::D, truncation);
  auto merged = wedge_merge(ka.xi, kb.xi);
  if (!merged) return out;
  int koszul = pow_sign(static_cast<long>(payload_degree(ka, BundleKind::D)) *
                        static_cast<long>(kb.xi.size()));
  Rational pre(koszul * merged->first);
  FD t1{ca, ka.y, ka.dpayload};
  FD t2{cb, kb.y, kb.dpayload};
  for (const auto& t : fd_bullet(t1, t2)) {
    SectionKey key{merged->second, t.y, {}, t.slots};
    out.add_term(std::move(key), t.c * pre);
  }
  return out;
}

}  // namespace

MixedSection fiberwise_bullet(const MixedSection& a, const MixedSection& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.kind() != BundleKind::D || b.kind() != BundleKind::D)
    throw std::invalid_argument("fiberwise_bullet expects D sections");
  if (a.truncation() != b.truncation()) throw std::invalid_argument("truncation mismatch");
  MixedSection out(a.chart(), BundleKind::D, a.truncation());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms())
      out += fd_pair_bullet(a.chart(), a.truncation(), ka, ca, kb, cb);
  return out;
}

MixedSection fiberwise_gerstenhaber(const MixedSection& a, const MixedSection& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.kind() != BundleKind::D || b.kind() != BundleKind::D)
    throw std::invalid_argument("fiberwise_gerstenhaber expects D sections");
  if (a.truncation() != b.truncation()) throw std::invalid_argument("truncation mismatch");
  MixedSection out(a.chart(), BundleKind::D, a.truncation());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      int deg1 = static_cast<int>(ka.xi.size()) + payload_degree(ka, BundleKind::D);
      int deg2 = static_cast<int>(kb.xi.size()) + payload_degree(kb, BundleKind::D);
      out += fd_pair_bullet(a.chart(), a.truncation(), ka, ca, kb, cb);
      out -= fd_pair_bullet(a.chart(), a.truncation(), kb, cb, ka, ca) *
             Rational(pow_sign(static_cast<long>(deg1) * deg2));
    }
  }
  return out;
}

MixedSection fiber_multiplication(const ChartPtr& chart, int truncation) {
  MixedSection m(chart, BundleKind::D, truncation);
  std::vector<int> zero(chart->rank(), 0);
  m.add_term({{}, zero, {}, {zero, zero}}, chart->one());
  return m;
}

namespace {

MixedSection d_E_section(const MixedSection& s) {
  const ChartPtr& chart = s.chart();
  const int r = chart->rank();
  MixedSection out(chart, s.kind(), s.truncation());
  for (const auto& [key, coeff] : s.terms()) {
    for (int i = 1; i <= r; ++i) {
      Poly g = chart->anchor_apply(i, coeff);
      if (g.is_zero()) continue;
      auto merged = wedge_merge({i}, key.xi);
      if (!merged) continue;
      SectionKey k2{merged->second, key.y, key.tpayload, key.dpayload};
      out.add_term(std::move(k2), g * Rational(merged->first));
    }
    for (std::size_t pos = 0; pos < key.xi.size(); ++pos) {
      int k = key.xi[pos];
      auto [inner_sign, rest] = remove_at(key.xi, pos);
      for (const auto& [skey, c] : chart->structure_terms()) {
        if (skey[2] != k) continue;
        const auto oriented = {std::make_pair(std::make_pair(skey[0], skey[1]), c),
                               std::make_pair(std::make_pair(skey[1], skey[0]), -c)};
        for (const auto& [ij, cval] : oriented) {
          auto m1 = wedge_merge({ij.second}, rest);
          if (!m1) continue;
          auto m2 = wedge_merge({ij.first}, m1->second);
          if (!m2) continue;
          Rational factor(-(m1->first * m2->first * inner_sign), 2);
          SectionKey k2{m2->second, key.y, key.tpayload, key.dpayload};
          out.add_term(std::move(k2), (coeff * cval) * factor);
        }
      }
    }
  }
  return out;
}

MixedSection gamma_t_section(const Connection& conn, int truncation) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  MixedSection g(chart, BundleKind::T, truncation);
  std::vector<int> zero(r, 0);
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k) {
        const Poly& gamma = conn.gamma(i, j, k);
        if (gamma.is_zero()) continue;
        g.add_term({{i}, add_e(zero, j - 1), {k}, {}}, -gamma);
      }
  return g;
}

MixedSection t_to_d(const MixedSection& s) {
  MixedSection out(s.chart(), BundleKind::D, s.truncation());
  const int r = s.chart()->rank();
  for (const auto& [key, c] : s.terms()) {
    if (key.tpayload.size() != 1)
      throw std::invalid_argument("only T^0 sections convert to D");
    std::vector<int> slot(r, 0);
    slot[key.tpayload[0] - 1] = 1;
    out.add_term({key.xi, key.y, {}, {slot}}, c);
  }
  return out;
}

}  // namespace

MixedSection t0_action(const MixedSection& field, const MixedSection& s) {
  require_same_chart(field.chart(), s.chart());
  if (field.kind() != BundleKind::T) throw std::invalid_argument("t0_action expects a T field");
  switch (s.kind()) {
    case BundleKind::W: {
      MixedSection out(s.chart(), BundleKind::W, s.truncation());
      for (const auto& [kf, cf] : field.terms()) {
        if (kf.tpayload.size() != 1)
          throw std::invalid_argument("t0_action field must have payload arity 0");
        int k = kf.tpayload[0];
        for (const auto& [ks, cs] : s.terms()) {
          if (ks.y[k - 1] == 0) continue;
          auto merged = wedge_merge(kf.xi, ks.xi);
          if (!merged) continue;
          SectionKey key{merged->second, exps_add(kf.y, sub_e(ks.y, k - 1)), {}, {}};
          out.add_term(std::move(key), cf * cs * Rational(ks.y[k - 1] * merged->first));
        }
      }
      return out;
    }
    case BundleKind::T:
      return fiberwise_schouten(field, s);
    case BundleKind::D:
      return fiberwise_gerstenhaber(t_to_d(field), s);
  }
  throw std::logic_error("unreachable");
}

MixedSection nabla(const MixedSection& s, const Connection& conn) {
  require_same_chart(s.chart(), conn.chart());
  MixedSection out = d_E_section(s);
  MixedSection gamma = gamma_t_section(conn, s.truncation());
  out += t0_action(gamma, s);
  return out;
}

MixedSection curvature_section(const Connection& conn, int truncation) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  ETensor curv = curvature(conn);
  MixedSection out(chart, BundleKind::T, truncation);
  std::vector<int> zero(r, 0);
  for (const auto& [idx, value] : curv.entries()) {
    int l = idx[0], i = idx[1], j = idx[2], k = idx[3];
    out.add_term({{i, j}, add_e(zero, k - 1), {l}, {}}, value * Rational(-1, 2));
  }
  return out;
}

FlatStructure solve_A(const ChartPtr& chart, const Connection& conn, int truncation) {
  require_same_chart(chart, conn.chart());
  if (truncation < 2) throw std::invalid_argument("flattening needs truncation >= 2");
  if (!is_torsion_free(conn))
    throw std::invalid_argument("flattening requires a torsion-free connection");

  MixedSection curv = curvature_section(conn, truncation);
  MixedSection a(chart, BundleKind::T, truncation);
  for (int degree = 2; degree <= truncation; ++degree) {
    MixedSection rhs = curv + nabla(a, conn) + fiberwise_schouten(a, a) * Rational(1, 2);
    a += kappa(rhs).y_component(degree);
  }
  return FlatStructure{chart, conn, truncation, a};
}

MixedSection flat_D(const FlatStructure& fs, const MixedSection& s) {
  MixedSection out = nabla(s, fs.conn);
  out -= delta(s);
  out += t0_action(fs.A, s);
  return out;
}

int reliable_degree(const FlatStructure& fs, BundleKind kind) {
  // The missing fiber degrees > N of A pollute D^2 from degree N-1 up on
  // payload-bearing sections (their payloads differentiate A's y part), and
  // from degree N up on W sections.
  return kind == BundleKind::W ? fs.truncation - 1 : fs.truncation - 2;
}

MixedSection d_squared_residual(const FlatStructure& fs, const MixedSection& s) {
  return flat_D(fs, flat_D(fs, s)).truncate_y(reliable_degree(fs, s.kind()));
}

MixedSection flatness_residual(const FlatStructure& fs) {
  MixedSection residual = delta(fs.A);
  residual -= curvature_section(fs.conn, fs.truncation);
  residual -= nabla(fs.A, fs.conn);
  residual -= fiberwise_schouten(fs.A, fs.A) * Rational(1, 2);
  return residual.truncate_y(fs.truncation - 1);
}

MixedSection theta_lift(const FlatStructure& fs, const MixedSection& u0) {
  require_same_chart(fs.chart, u0.chart());
  if (u0.truncation() != fs.truncation) throw std::invalid_argument("truncation mismatch");
  for (const auto& [k, c] : u0.terms())
    if (!k.xi.empty() || total(k.y) != 0)
      throw std::invalid_argument("theta_lift input must be fiber-constant of form degree 0");
  MixedSection u = u0;
  for (int degree = 1; degree <= fs.truncation; ++degree) {
    MixedSection rhs = nabla(u, fs.conn) + t0_action(fs.A, u);
    u += kappa(rhs).y_component(degree);
  }
  return u;
}

MixedSection w_section(const ChartPtr& chart, int truncation, const Poly& f) {
  MixedSection s(chart, BundleKind::W, truncation);
  s.add_term({{}, std::vector<int>(chart->rank(), 0), {}, {}}, f);
  return s;
}

MixedSection t_section(const PolyVector& v, int truncation) {
  MixedSection s(v.chart(), BundleKind::T, truncation);
  std::vector<int> zero(v.chart()->rank(), 0);
  for (const auto& [tuple, c] : v.terms()) s.add_term({{}, zero, tuple, {}}, c);
  return s;
}

PolyVector harmonic_polyvector(const MixedSection& s) {
  if (s.kind() != BundleKind::T) throw std::invalid_argument("expected a T section");
  PolyVector v(s.chart());
  for (const auto& [k, c] : s.terms())
    if (k.xi.empty() && total(k.y) == 0) v.add_term(k.tpayload, c);
  return v;
}

YPolyUE tau(int k, const Connection& conn) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  YPolyUE cur;
  cur.emplace(std::vector<int>(r, 0), UEElement::one(chart));
  auto accumulate = [](YPolyUE& sum, const std::vector<int>& y, const UEElement& u) {
    auto [it, inserted] = sum.emplace(y, u);
    if (!inserted) it->second += u;
    if (it->second.is_zero()) sum.erase(it);
  };
  for (int step = 0; step < k; ++step) {
    YPolyUE next;
    for (const auto& [y, u] : cur) {
      for (int i = 1; i <= r; ++i)
        accumulate(next, add_e(y, i - 1), ue_mul(UEElement::generator(chart, i), u));
      for (int l = 1; l <= r; ++l) {
        if (y[l - 1] == 0) continue;
        UEElement du = u * Rational(y[l - 1]);
        for (int i = 1; i <= r; ++i)
          for (int j = 1; j <= r; ++j) {
            const Poly& gamma = conn.gamma(i, j, l);
            if (gamma.is_zero()) continue;
            accumulate(next, add_e(add_e(sub_e(y, l - 1), i - 1), j - 1), -(du * gamma));
          }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

UEElement mu_single(const Connection& conn, const std::vector<int>& alpha) {
  const ChartPtr& chart = conn.chart();
  if (static_cast<int>(alpha.size()) != chart->rank())
    throw std::invalid_argument("multi-index length != rank");
  int k = total(alpha);
  YPolyUE t = tau(k, conn);
  auto it = t.find(alpha);
  if (it == t.end()) return UEElement(chart);
  // d^alpha(y^alpha) = alpha!; divided by k! from the definition.
  Rational scale(1);
  for (int v : alpha)
    for (int x = 2; x <= v; ++x) scale *= Rational(x);
  for (int x = 2; x <= k; ++x) scale /= Rational(x);
  return it->second * scale;
}

PolyDiffOp mu_map(const MixedSection& constant_op, const Connection& conn) {
  if (constant_op.kind() != BundleKind::D)
    throw std::invalid_argument("mu_map expects a D section");
  const ChartPtr& chart = constant_op.chart();
  int arity = -2;
  for (const auto& [k, c] : constant_op.terms()) {
    if (!k.xi.empty() || total(k.y) != 0)
      throw std::invalid_argument("mu_map input must be fiber-constant of form degree 0");
    int a = static_cast<int>(k.dpayload.size()) - 1;
    if (arity == -2) arity = a;
    if (a != arity) throw std::invalid_argument("mu_map input must have homogeneous arity");
  }
  if (arity == -2) return PolyDiffOp(chart, 0);
  PolyDiffOp out(chart, arity);
  for (const auto& [k, c] : constant_op.terms()) {
    std::vector<UEElement> slots;
    slots.reserve(k.dpayload.size());
    for (const auto& alpha : k.dpayload) slots.push_back(mu_single(conn, alpha));
    out += PolyDiffOp::tensor(chart, slots) * c;
  }
  return out;
}

std::vector<IdentityViolation> bracket_transfer_check(const PolyVector& u0, const PolyVector& v0,
                                                      const FlatStructure& fs) {
  std::vector<IdentityViolation> report;
  MixedSection lift_u = theta_lift(fs, t_section(u0, fs.truncation));
  MixedSection lift_v = theta_lift(fs, t_section(v0, fs.truncation));
  PolyVector transferred = harmonic_polyvector(fiberwise_schouten(lift_u, lift_v));
  PolyVector direct = schouten_bracket(u0, v0);
  PolyVector residual = transferred - direct;
  if (!residual.is_zero()) {
    for (const auto& [tuple, c] : residual.terms()) {
      std::ostringstream name;
      name << "bracket-transfer(";
      for (std::size_t s = 0; s < tuple.size(); ++s) name << (s ? "," : "") << tuple[s];
      name << ")";
      report.push_back({name.str(), c});
    }
  }
  return report;
}

namespace {

MixedSection constant_d_op(const ChartPtr& chart, int truncation,
                           const std::vector<std::vector<int>>& slots, const Poly& coeff) {
  MixedSection s(chart, BundleKind::D, truncation);
  s.add_term({{}, std::vector<int>(chart->rank(), 0), {}, slots}, coeff);
  return s;
}

// fiberwise coproduct of a constant single-slot operator: binomial splits
MixedSection fiber_coproduct(const MixedSection& op) {
  const ChartPtr& chart = op.chart();
  MixedSection out(chart, BundleKind::D, op.truncation());
  for (const auto& [k, c] : op.terms()) {
    if (k.dpayload.size() != 1) throw std::invalid_argument("fiber_coproduct expects arity 0");
    std::vector<std::pair<std::vector<std::vector<int>>, Rational>> splits;
    alpha_splits(k.dpayload[0], 2, splits);
    for (const auto& [parts, mult] : splits)
      out.add_term({k.xi, k.y, {}, {parts[0], parts[1]}}, c * mult);
  }
  return out;
}

}  // namespace

std::vector<IdentityViolation> mu_transfer_check(const FlatStructure& fs) {
  std::vector<IdentityViolation> report;
  const ChartPtr& chart = fs.chart;
  const int r = chart->rank();
  const int d = chart->base_dim();
  const int n = fs.truncation;
  std::vector<int> zero(r, 0);

  auto lift_op = [&](const MixedSection& op) { return theta_lift(fs, op); };
  auto check = [&](const std::string& name, const UEElement& lhs, const UEElement& rhs) {
    UEElement residual = lhs - rhs;
    if (!residual.is_zero()) report.push_back({name, residual.terms().begin()->second});
  };
  auto as_ue = [&](const PolyDiffOp& p) {
    UEElement u(chart);
    for (const auto& [t, c] : p.terms()) u.add_term(t[0], c);
    return u;
  };

  // sample functions: constants over a point, coordinates otherwise
  std::vector<Poly> samples;
  if (d == 0) {
    samples.push_back(Poly::constant(0, Rational(2)));
    samples.push_back(Poly::constant(0, Rational(-3, 2)));
  } else {
    samples.push_back(Poly::variable(d, 1));
    samples.push_back(parse_poly("x1*x1 + x" + std::to_string(d), d));
  }

  std::vector<MixedSection> gen_ops;  // mu^{-1}(e_i) = d/dy^i
  for (int i = 1; i <= r; ++i)
    gen_ops.push_back(constant_d_op(chart, n, {add_e(zero, i - 1)}, chart->one()));

  // vector . vector on all generator pairs
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j) {
      UEElement lhs = ue_mul(UEElement::generator(chart, i), UEElement::generator(chart, j));
      MixedSection product = fiberwise_bullet(lift_op(gen_ops[i - 1]), lift_op(gen_ops[j - 1]));
      check("mu-transfer-vv(" + std::to_string(i) + "," + std::to_string(j) + ")", lhs,
            as_ue(mu_map(harmonic(product), fs.conn)));
    }

  // vector . function and function . vector
  for (int i = 1; i <= r; ++i)
    for (std::size_t sample = 0; sample < samples.size(); ++sample) {
      const Poly& f = samples[sample];
      MixedSection f_op = constant_d_op(chart, n, {zero}, f);
      UEElement f_ue(chart, f);
      UEElement gen = UEElement::generator(chart, i);

      MixedSection vf = fiberwise_bullet(lift_op(gen_ops[i - 1]), lift_op(f_op));
      check("mu-transfer-vf(" + std::to_string(i) + ";" + std::to_string(sample) + ")",
            ue_mul(gen, f_ue), as_ue(mu_map(harmonic(vf), fs.conn)));

      MixedSection fv = fiberwise_bullet(lift_op(f_op), lift_op(gen_ops[i - 1]));
      check("mu-transfer-fv(" + std::to_string(i) + ";" + std::to_string(sample) + ")",
            ue_mul(f_ue, gen), as_ue(mu_map(harmonic(fv), fs.conn)));
    }

  // function . function
  {
    MixedSection f_op = constant_d_op(chart, n, {zero}, samples[0]);
    MixedSection g_op = constant_d_op(chart, n, {zero}, samples[1]);
    MixedSection fg = fiberwise_bullet(lift_op(f_op), lift_op(g_op));
    check("mu-transfer-ff", ue_mul(UEElement(chart, samples[0]), UEElement(chart, samples[1])),
          as_ue(mu_map(harmonic(fg), fs.conn)));
  }

  // mu o Delta = Delta o mu on the symmetric part (orders 1 and 2)
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j) {
      std::vector<int> alpha = add_e(add_e(zero, i - 1), j - 1);
      MixedSection op = constant_d_op(chart, n, {alpha}, chart->one());
      PolyDiffOp lhs = mu_map(fiber_coproduct(op), fs.conn);
      PolyDiffOp rhs = coproduct(mu_single(fs.conn, alpha));
      if (lhs != rhs)
        report.push_back({"mu-coproduct(" + std::to_string(i) + "," + std::to_string(j) + ")",
                          Poly::constant(d, Rational(1))});
    }
  for (int i = 1; i <= r; ++i) {
    MixedSection op = constant_d_op(chart, n, {add_e(zero, i - 1)}, chart->one());
    PolyDiffOp lhs = mu_map(fiber_coproduct(op), fs.conn);
    PolyDiffOp rhs = coproduct(mu_single(fs.conn, add_e(zero, i - 1)));
    if (lhs != rhs)
      report.push_back({"mu-coproduct(" + std::to_string(i) + ")", Poly::constant(d, Rational(1))});
  }

  return report;
}

}  // namespace algebroid
