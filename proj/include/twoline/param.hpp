#pragma once

// Real parameters carried with an exact rational shadow when the input was
// a decimal or fraction literal, so that relations like a == b or a*b == 1
// are decided exactly where possible.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace twoline {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kExactTolerance = 1e-9;

class Param {
 public:
  Param() = default;
  explicit Param(double value);
  explicit Param(const Rational& exact);

  // Accepts "2", "0.5", "-1.25e3", "1/3". Throws InputError otherwise.
  static Param parse(std::string_view text);

  double value() const noexcept { return value_; }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  bool is_exact() const noexcept { return exact_.has_value(); }

  Param reciprocal() const;
  Param operator*(const Param& other) const;

  // Exact when both sides are exact, else |a-b| <= kExactTolerance.
  bool equals(const Param& other) const;
  bool is_one() const { return equals(Param(Rational(1))); }
  bool positive() const;

  std::string str() const;

 private:
  double value_ = 0.0;
  std::optional<Rational> exact_;
};

}  // namespace twoline
