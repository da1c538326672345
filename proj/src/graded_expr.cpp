#include "graded_expr.hpp"

#include <cctype>

namespace algebroid::detail {

namespace {

class GradedParser {
public:
  GradedParser(const std::string& text, int nvars, std::string prefix, bool allow_power)
      : text_(text), nvars_(nvars), prefix_(std::move(prefix)), allow_power_(allow_power) {}

  std::vector<GradedTerm> parse() {
    std::vector<GradedTerm> out;
    int sign = 1;
    if (consume('-')) sign = -1;
    out.push_back(parse_term(sign));
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        out.push_back(parse_term(1));
      } else if (c == '-') {
        ++pos_;
        out.push_back(parse_term(-1));
      } else {
        break;
      }
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return out;
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

  bool at_basis_prefix() {
    skip_ws();
    if (text_.compare(pos_, prefix_.size(), prefix_) != 0) return false;
    std::size_t next = pos_ + prefix_.size();
    return next < text_.size() && std::isdigit(static_cast<unsigned char>(text_[next]));
  }

  int read_natural() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected digits");
    if (pos_ - start > 6) fail("numeric literal too large");
    return std::stoi(text_.substr(start, pos_ - start));
  }

  GradedTerm parse_term(int sign) {
    GradedTerm term;
    term.coeff = Poly::constant(nvars_, Rational(sign));
    bool any = false;
    do {
      parse_factor(term);
      any = true;
    } while (consume('*'));
    if (!any) fail("empty term");
    return term;
  }

  void parse_factor(GradedTerm& term) {
    if (at_basis_prefix()) {
      parse_basis_chain(term);
      return;
    }
    term.coeff = term.coeff * parse_poly_factor();
  }

  void parse_basis_chain(GradedTerm& term) {
    term.indices.push_back(read_basis_element());
    while (true) {
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '^') return;
      std::size_t save = pos_;
      ++pos_;
      if (at_basis_prefix()) {
        term.indices.push_back(read_basis_element());
      } else if (allow_power_ && std::isdigit(static_cast<unsigned char>(peek()))) {
        int n = read_natural();
        if (n == 0) fail("zero power of a generator is not supported here");
        int idx = term.indices.back();
        for (int k = 1; k < n; ++k) term.indices.push_back(idx);
      } else {
        pos_ = save;
        fail("expected basis element after '^'");
      }
    }
  }

  int read_basis_element() {
    skip_ws();
    pos_ += prefix_.size();
    int idx = read_natural();
    if (idx < 1) fail("basis index must be positive");
    return idx;
  }

  Poly parse_poly_factor() {
    char c = peek();
    Poly base(nvars_);
    if (c == '(') {
      std::size_t start = pos_;
      int depth = 0;
      std::size_t end = pos_;
      for (; end < text_.size(); ++end) {
        if (text_[end] == '(') ++depth;
        if (text_[end] == ')' && --depth == 0) break;
      }
      if (end == text_.size()) fail("unbalanced '('");
      base = parse_poly(text_.substr(start + 1, end - start - 1), nvars_);
      pos_ = end + 1;
    } else if (c == 'x' && !at_basis_prefix()) {
      ++pos_;
      std::size_t at = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("expected variable index after 'x'", at);
      int index = read_natural();
      if (index < 1 || index > nvars_)
        throw ParseError("variable x" + std::to_string(index) + " out of range", at);
      base = Poly::variable(nvars_, index);
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      bool negative = consume('-');
      std::string num = read_digits_string();
      std::string den = "1";
      if (consume('/')) {
        std::size_t at = pos_;
        den = read_digits_string();
        if (den.find_first_not_of('0') == std::string::npos)
          throw ParseError("denominator must be positive", at);
      }
      base = Poly::constant(nvars_, Rational::from_string((negative ? "-" : "") + num + "/" + den));
    } else {
      fail("expected coefficient or basis element");
    }
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      std::size_t save = pos_;
      ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;  // a wedge '^' belongs to the chain parser
        return base;
      }
      int n = read_natural();
      Poly r = Poly::constant(nvars_, Rational(1));
      for (int k = 0; k < n; ++k) r = r * base;
      return r;
    }
    return base;
  }

  std::string read_digits_string() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) fail("expected digits");
    return text_.substr(start, pos_ - start);
  }

  const std::string& text_;
  int nvars_;
  std::string prefix_;
  bool allow_power_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<GradedTerm> parse_graded_expr(const std::string& text, int nvars,
                                          const std::string& prefix, bool allow_power) {
  return GradedParser(text, nvars, prefix, allow_power).parse();
}

std::vector<std::string> split_tensor_slots(const std::string& text) {
  std::vector<std::string> slots;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == '|' && depth == 0) {
      slots.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  slots.push_back(text.substr(start));
  return slots;
}

}  // namespace algebroid::detail
