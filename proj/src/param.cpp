#include "twoline/param.hpp"

#include "twoline/error.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace twoline {

namespace {

Rational pow10(long e) {
  Rational r(1);
  for (long i = 0; i < std::labs(e); ++i) r *= 10;
  return e < 0 ? Rational(1) / r : r;
}

// Decimal literal -> rational. Returns nullopt when the text is not a plain
// decimal (e.g. "inf", hex floats).
std::optional<Rational> parse_decimal(std::string_view s) {
  size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  boost::multiprecision::cpp_int mantissa = 0;
  long scale = 0;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      digits = true;
      if (dot) --scale;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    if (i == s.size()) return std::nullopt;
    long e = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
      e = e * 10 + (s[i] - '0');
      if (e > 400) return std::nullopt;
    }
    scale += eneg ? -e : e;
  }
  if (i != s.size()) return std::nullopt;
  Rational r = Rational(mantissa) * pow10(scale);
  return negative ? Rational(-r) : r;
}

}  // namespace

Param::Param(double value) : value_(value) {}

Param::Param(const Rational& exact)
    : value_(static_cast<double>(exact)), exact_(exact) {}

Param Param::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    auto num = parse_decimal(text.substr(0, slash));
    auto den = parse_decimal(text.substr(slash + 1));
    if (!num || !den) throw InputError("not a number: '" + std::string(text) + "'");
    if (*den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Param(Rational(*num / *den));
  }
  if (auto r = parse_decimal(text)) return Param(*r);
  throw InputError("not a number: '" + std::string(text) + "'");
}

Param Param::reciprocal() const {
  if (exact_) {
    if (*exact_ == 0) throw DomainError("reciprocal of zero");
    return Param(Rational(1) / *exact_);
  }
  return Param(1.0 / value_);
}

Param Param::operator*(const Param& other) const {
  if (exact_ && other.exact_) return Param(Rational(*exact_ * *other.exact_));
  return Param(value_ * other.value_);
}

bool Param::equals(const Param& other) const {
  if (exact_ && other.exact_) return *exact_ == *other.exact_;
  return std::fabs(value_ - other.value_) <= kExactTolerance;
}

bool Param::positive() const {
  if (exact_) return *exact_ > 0;
  return value_ > 0;
}

std::string Param::str() const {
  if (exact_) {
    auto s = exact_->str();
    return s;
  }
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

}  // namespace twoline
