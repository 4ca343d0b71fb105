#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "tube/errors.hpp"

namespace tube {

// Signed real carried as sign * 2^e2 * exp(lm) with lm normalized to
// [0, ln 2). Products and powers are exact on the power-of-two part; sums go
// through log-sum-exp. Infinity is a tagged state, never a large float.
// Needed because expressions like e^{sqrt(2) L} with L = 12580 overflow every
// fixed-width float, while the guaranteed radii must still divide by them.
class LogReal {
 public:
  enum class Tag { Zero, Finite, Inf };

  LogReal() : tag_(Tag::Zero), sign_(0), e2_(0), lm_(0.0) {}

  static LogReal zero() { return LogReal(); }
  static LogReal one() { return from_log(+1, 0.0); }
  static LogReal infinity(int sign = +1);
  static LogReal from_double(double x);
  static LogReal from_log(int sign, double log_magnitude);
  // exp(x) as a LogReal, valid for any finite x.
  static LogReal exp_of(double x) { return from_log(+1, x); }
  // exp(x) - 1 without forming exp(x).
  static LogReal expm1_of(double x);

  bool is_zero() const { return tag_ == Tag::Zero; }
  bool is_finite() const { return tag_ == Tag::Finite; }
  bool is_infinite() const { return tag_ == Tag::Inf; }
  int sign() const { return tag_ == Tag::Zero ? 0 : sign_; }
  double log_magnitude() const;
  double log10_magnitude() const { return log_magnitude() / std::log(10.0); }

  // Converts back to double; overflows to +-infinity, underflows to 0.
  double to_double() const;

  LogReal operator-() const;
  LogReal operator*(const LogReal& o) const;
  LogReal operator/(const LogReal& o) const;
  LogReal operator+(const LogReal& o) const;
  LogReal operator-(const LogReal& o) const { return *this + (-o); }
  LogReal pow(double e) const;

  bool operator<(const LogReal& o) const;
  bool operator>(const LogReal& o) const { return o < *this; }

  // Renders "10^{-100.30}" / "-10^{2.41}" / "0" / "inf".
  std::string to_pow10_string(int digits = 2) const;

 private:
  void normalize();
  Tag tag_;
  int sign_;
  std::int64_t e2_;
  double lm_;
};

LogReal min(const LogReal& a, const LogReal& b);

}  // namespace tube
