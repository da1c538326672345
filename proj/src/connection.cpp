#include "algebroid/connection.hpp"

#include <sstream>
#include <stdexcept>

namespace algebroid {

ETensor::ETensor(ChartPtr chart, int contra, int co)
    : chart_(std::move(chart)), contra_(contra), co_(co) {
  if (contra < 0 || co < 0) throw std::invalid_argument("negative tensor arity");
}

Poly ETensor::at(const IndexTuple& indices) const {
  if (static_cast<int>(indices.size()) != contra_ + co_)
    throw std::invalid_argument("tensor index tuple length mismatch");
  auto it = entries_.find(indices);
  return it == entries_.end() ? chart_->zero() : it->second;
}

void ETensor::set(const IndexTuple& indices, const Poly& value) {
  if (static_cast<int>(indices.size()) != contra_ + co_)
    throw std::invalid_argument("tensor index tuple length mismatch");
  for (int idx : indices)
    if (idx < 1 || idx > chart_->rank()) throw std::out_of_range("tensor index out of range");
  if (value.is_zero())
    entries_.erase(indices);
  else
    entries_[indices] = value;
}

void ETensor::add(const IndexTuple& indices, const Poly& value) {
  set(indices, at(indices) + value);
}

ETensor ETensor::operator-() const {
  ETensor r(chart_, contra_, co_);
  for (const auto& [t, v] : entries_) r.entries_.emplace(t, -v);
  return r;
}

ETensor& ETensor::operator+=(const ETensor& o) {
  require_same_chart(chart_, o.chart_);
  if (contra_ != o.contra_ || co_ != o.co_) throw std::invalid_argument("tensor shape mismatch");
  for (const auto& [t, v] : o.entries_) add(t, v);
  return *this;
}

ETensor& ETensor::operator-=(const ETensor& o) {
  require_same_chart(chart_, o.chart_);
  if (contra_ != o.contra_ || co_ != o.co_) throw std::invalid_argument("tensor shape mismatch");
  for (const auto& [t, v] : o.entries_) add(t, -v);
  return *this;
}

Connection::Connection(ChartPtr chart) : chart_(std::move(chart)) {
  const int r = chart_->rank();
  gamma_.assign(static_cast<std::size_t>(r) * r * r, chart_->zero());
}

const Poly& Connection::gamma(int i, int j, int k) const {
  const int r = chart_->rank();
  if (i < 1 || j < 1 || k < 1 || i > r || j > r || k > r)
    throw std::out_of_range("Christoffel index out of range");
  return gamma_[(static_cast<std::size_t>(i - 1) * r + (j - 1)) * r + (k - 1)];
}

void Connection::set_gamma(int i, int j, int k, const Poly& value) {
  const int r = chart_->rank();
  if (i < 1 || j < 1 || k < 1 || i > r || j > r || k > r)
    throw std::out_of_range("Christoffel index out of range");
  if (value.nvars() != chart_->base_dim())
    throw std::invalid_argument("Christoffel entry nvars mismatch");
  gamma_[(static_cast<std::size_t>(i - 1) * r + (j - 1)) * r + (k - 1)] = value;
}

Connection canonical_torsion_free(const ChartPtr& chart) {
  Connection conn(chart);
  const int r = chart->rank();
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k)
        conn.set_gamma(i, j, k, chart->structure(i, j, k) * Rational(1, 2));
  return conn;
}

ETensor torsion(const Connection& conn) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  ETensor t(chart, 1, 2);
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k)
        t.set({k, i, j}, conn.gamma(i, j, k) - conn.gamma(j, i, k) - chart->structure(i, j, k));
  return t;
}

ETensor curvature(const Connection& conn) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  ETensor curv(chart, 1, 3);
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k)
        for (int l = 1; l <= r; ++l) {
          Poly v = chart->anchor_apply(i, conn.gamma(j, k, l)) -
                   chart->anchor_apply(j, conn.gamma(i, k, l));
          for (int m = 1; m <= r; ++m) {
            v += conn.gamma(i, m, l) * conn.gamma(j, k, m);
            v -= conn.gamma(i, k, m) * conn.gamma(j, m, l);
            v -= chart->structure(i, j, m) * conn.gamma(m, k, l);
          }
          curv.set({l, i, j, k}, v);
        }
  return curv;
}

bool is_torsion_free(const Connection& conn) { return torsion(conn).is_zero(); }

ETensor covariant_derivative(int direction, const ETensor& tensor, const Connection& conn) {
  const ChartPtr& chart = tensor.chart();
  const int r = chart->rank();
  if (direction < 1 || direction > r) throw std::out_of_range("direction index out of range");
  ETensor out(chart, tensor.contra(), tensor.co());
  for (const auto& [idx, value] : tensor.entries()) {
    out.add(idx, chart->anchor_apply(direction, value));
    for (int s = 0; s < tensor.contra(); ++s) {
      // slot s holds index m in the source; Gamma_{direction m}^{a} e_a
      for (int a = 1; a <= r; ++a) {
        IndexTuple shifted = idx;
        int m = shifted[s];
        shifted[s] = a;
        out.add(shifted, conn.gamma(direction, m, a) * value);
      }
    }
    for (int t = 0; t < tensor.co(); ++t) {
      int pos = tensor.contra() + t;
      int m = idx[pos];
      for (int b = 1; b <= r; ++b) {
        IndexTuple shifted = idx;
        shifted[pos] = b;
        out.add(shifted, -(conn.gamma(direction, b, m) * value));
      }
    }
  }
  return out;
}

ETensor covariant_derivative(const PolyVector& direction, const ETensor& tensor,
                             const Connection& conn) {
  const ChartPtr& chart = tensor.chart();
  require_same_chart(direction.chart(), chart);
  if (!direction.is_homogeneous(0))
    throw std::invalid_argument("covariant derivative direction must be a vector field");
  ETensor out(chart, tensor.contra(), tensor.co());
  for (const auto& [tuple, coeff] : direction.terms()) {
    ETensor part = covariant_derivative(tuple[0], tensor, conn);
    for (const auto& [idx, value] : part.entries()) out.add(idx, coeff * value);
  }
  return out;
}

namespace {

void collect(std::vector<IdentityViolation>& report, const std::string& name, const Poly& value) {
  if (!value.is_zero()) report.push_back({name, value});
}

}  // namespace

std::vector<IdentityViolation> bianchi_check(const Connection& conn) {
  const ChartPtr& chart = conn.chart();
  const int r = chart->rank();
  std::vector<IdentityViolation> report;

  ETensor curv = curvature(conn);
  ETensor tors = torsion(conn);
  std::vector<ETensor> nabla_curv, nabla_tors;
  nabla_curv.reserve(r);
  nabla_tors.reserve(r);
  for (int i = 1; i <= r; ++i) {
    nabla_curv.push_back(covariant_derivative(i, curv, conn));
    nabla_tors.push_back(covariant_derivative(i, tors, conn));
  }

  auto cyclic = [](int i, int j, int k) {
    return std::vector<std::array<int, 3>>{{i, j, k}, {j, k, i}, {k, i, j}};
  };

  for (int i = 1; i <= r; ++i)
    for (int j = 1; j <= r; ++j)
      for (int k = 1; k <= r; ++k) {
        // differential identity: sum_cyc (nabla_u R)(v, w) + R(T(u, v), w) = 0
        for (int l = 1; l <= r; ++l)
          for (int m = 1; m <= r; ++m) {
            Poly sum = chart->zero();
            for (auto [a, b, c] : cyclic(i, j, k)) {
              sum += nabla_curv[a - 1].at({m, b, c, l});
              for (int p = 1; p <= r; ++p)
                sum += tors.at({p, a, b}) * curv.at({m, p, c, l});
            }
            std::ostringstream name;
            name << "bianchi-differential(" << i << "," << j << "," << k << ";" << l << "," << m
                 << ")";
            collect(report, name.str(), sum);
          }
        // algebraic identity:
        //   sum_cyc R(u, v)w - T(T(u, v), w) - (nabla_u T)(v, w) = 0
        for (int m = 1; m <= r; ++m) {
          Poly sum = chart->zero();
          for (auto [a, b, c] : cyclic(i, j, k)) {
            sum += curv.at({m, a, b, c});
            sum -= nabla_tors[a - 1].at({m, b, c});
            for (int p = 1; p <= r; ++p) sum -= tors.at({p, a, b}) * tors.at({m, p, c});
          }
          std::ostringstream name;
          name << "bianchi-algebraic(" << i << "," << j << "," << k << ";" << m << ")";
          collect(report, name.str(), sum);
        }
      }
  return report;
}

}  // namespace algebroid
