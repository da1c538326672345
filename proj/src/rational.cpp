#include "algebroid/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace algebroid {

Rational Rational::from_string(const std::string& text) {
  mpq_class v;
  if (v.set_str(text, 10) != 0)
    throw std::invalid_argument("malformed rational: '" + text + "'");
  if (sgn(v.get_den()) == 0)
    throw std::invalid_argument("zero denominator in rational: '" + text + "'");
  v.canonicalize();
  return Rational(v);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  value_ /= o.value_;
  return *this;
}

std::string Rational::str() const {
  if (value_.get_den() == 1) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace algebroid
