#include "algebroid/poly.hpp"

#include <cctype>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace algebroid {

Poly::Poly(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("negative variable count");
}

Poly Poly::constant(int nvars, const Rational& c) {
  Poly p(nvars);
  if (!c.is_zero()) p.terms_.emplace(Exponents(nvars, 0), c);
  return p;
}

Poly Poly::variable(int nvars, int index) {
  if (index < 1 || index > nvars)
    throw std::out_of_range("variable index " + std::to_string(index) + " out of range 1.." +
                            std::to_string(nvars));
  Poly p(nvars);
  Exponents e(nvars, 0);
  e[index - 1] = 1;
  p.terms_.emplace(std::move(e), Rational(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_.begin()->first == Exponents(nvars_, 0));
}

Rational Poly::constant_term() const {
  auto it = terms_.find(Exponents(nvars_, 0));
  return it == terms_.end() ? Rational(0) : it->second;
}

int Poly::degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int k : e) d += k;
    if (d > deg) deg = d;
  }
  return deg;
}

void Poly::check_compatible(const Poly& o) const {
  if (nvars_ != o.nvars_)
    throw std::invalid_argument("polynomial variable count mismatch: " + std::to_string(nvars_) +
                                " vs " + std::to_string(o.nvars_));
}

void Poly::add_term(const Exponents& exps, const Rational& c) {
  if (static_cast<int>(exps.size()) != nvars_)
    throw std::invalid_argument("exponent vector length mismatch");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(exps, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Poly Poly::operator-() const {
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_compatible(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly Poly::operator*(const Poly& o) const {
  check_compatible(o);
  Poly r(nvars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(nvars_);
      for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Poly Poly::operator*(const Rational& c) const {
  Poly r(nvars_);
  if (c.is_zero()) return r;
  for (const auto& [e, cc] : terms_) r.terms_.emplace(e, cc * c);
  return r;
}

bool Poly::operator<(const Poly& o) const {
  if (nvars_ != o.nvars_) return nvars_ < o.nvars_;
  auto cmp = [](const TermMap::value_type& a, const TermMap::value_type& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  };
  return std::lexicographical_compare(terms_.begin(), terms_.end(), o.terms_.begin(),
                                      o.terms_.end(), cmp);
}

Poly Poly::partial(int index) const {
  if (index < 1 || index > nvars_)
    throw std::out_of_range("derivative index out of range");
  Poly r(nvars_);
  for (const auto& [e, c] : terms_) {
    int k = e[index - 1];
    if (k == 0) continue;
    Exponents d = e;
    d[index - 1] = k - 1;
    r.add_term(d, c * Rational(k));
  }
  return r;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Reverse map order so higher powers of x1 come first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    bool negative = c.sign() < 0;
    Rational mag = negative ? -c : c;
    // A leading minus is only grammatical on a rational atom, so a negative
    // first term keeps an explicit "-1*" style coefficient.
    bool leading_minus = first && negative;
    if (first) {
      if (negative) os << "-";
    } else {
      os << (negative ? " - " : " + ");
    }
    bool has_vars = false;
    std::ostringstream vars;
    for (int k = 0; k < nvars_; ++k) {
      if (e[k] == 0) continue;
      if (has_vars) vars << "*";
      vars << "x" << (k + 1);
      if (e[k] > 1) vars << "^" << e[k];
      has_vars = true;
    }
    if (!has_vars) {
      os << mag.str();
    } else if (mag.is_one() && !leading_minus) {
      os << vars.str();
    } else {
      os << mag.str() << "*" << vars.str();
    }
    first = false;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

namespace {

// Recursive-descent parser over a raw character window.
class PolyParser {
public:
  PolyParser(const std::string& text, int nvars) : text_(text), nvars_(nvars) {}

  Poly parse() {
    Poly p = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  std::string read_digits() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected digits");
    return text_.substr(start, pos_ - start);
  }

  int read_natural() {
    std::string digits = read_digits();
    if (digits.size() > 6) fail("numeric literal too large");
    return std::stoi(digits);
  }

  Poly parse_expr() {
    Poly p = parse_term();
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        p += parse_term();
      } else if (c == '-') {
        ++pos_;
        p -= parse_term();
      } else {
        return p;
      }
    }
  }

  Poly parse_term() {
    Poly p = parse_factor();
    while (consume('*')) p = p * parse_factor();
    return p;
  }

  Poly parse_factor() {
    Poly base = parse_atom();
    if (consume('^')) {
      int n = read_natural();
      Poly r = Poly::constant(nvars_, Rational(1));
      for (int k = 0; k < n; ++k) r = r * base;
      return r;
    }
    return base;
  }

  Poly parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Poly p = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x') {
      ++pos_;
      std::size_t at = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("expected variable index after 'x'", at);
      int index = read_natural();
      if (index < 1 || index > nvars_)
        throw ParseError("variable x" + std::to_string(index) + " out of range (nvars = " +
                             std::to_string(nvars_) + ")",
                         at);
      return Poly::variable(nvars_, index);
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return parse_rational();
    fail("expected rational, variable or '('");
  }

  Poly parse_rational() {
    bool negative = consume('-');
    std::string num = read_digits();
    std::string den = "1";
    if (consume('/')) {
      std::size_t at = pos_;
      den = read_digits();
      if (den.find_first_not_of('0') == std::string::npos)
        throw ParseError("denominator must be positive", at);
    }
    Rational r = Rational::from_string((negative ? "-" : "") + num + "/" + den);
    return Poly::constant(nvars_, r);
  }

  const std::string& text_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text, int nvars) {
  return PolyParser(text, nvars).parse();
}

}  // namespace algebroid
