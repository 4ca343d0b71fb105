#include "tube/log_real.hpp"

#include <cstdio>
#include <limits>

namespace tube {

namespace {
constexpr double kLn2 = 0.6931471805599453094;
}

void LogReal::normalize() {
  if (tag_ != Tag::Finite) return;
  if (lm_ >= 0.0 && lm_ < kLn2) return;
  const double k = std::floor(lm_ / kLn2);
  e2_ += static_cast<std::int64_t>(k);
  lm_ -= k * kLn2;
  if (lm_ < 0.0) {  // guard against rounding at the seam
    lm_ += kLn2;
    e2_ -= 1;
  } else if (lm_ >= kLn2) {
    lm_ -= kLn2;
    e2_ += 1;
  }
}

LogReal LogReal::infinity(int sign) {
  LogReal r;
  r.tag_ = Tag::Inf;
  r.sign_ = sign >= 0 ? +1 : -1;
  return r;
}

LogReal LogReal::from_double(double x) {
  if (x == 0.0) return zero();
  if (std::isinf(x)) return infinity(x > 0 ? +1 : -1);
  if (std::isnan(x)) throw NumericsError("LogReal::from_double: NaN");
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = x > 0 ? +1 : -1;
  int e = 0;
  const double m = std::frexp(std::abs(x), &e);  // m in [0.5, 1)
  r.e2_ = e;
  r.lm_ = std::log(m);  // in [-ln2, 0)
  r.normalize();
  return r;
}

LogReal LogReal::from_log(int sign, double log_magnitude) {
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = sign >= 0 ? +1 : -1;
  const double k = std::floor(log_magnitude / kLn2);
  r.e2_ = static_cast<std::int64_t>(k);
  r.lm_ = log_magnitude - k * kLn2;
  r.normalize();
  return r;
}

LogReal LogReal::expm1_of(double x) {
  if (x == 0.0) return zero();
  if (x > 0.0) {
    // log(e^x - 1) = x + log(1 - e^{-x})
    return from_log(+1, x + std::log1p(-std::exp(-x)));
  }
  return from_double(std::expm1(x));
}

double LogReal::log_magnitude() const {
  switch (tag_) {
    case Tag::Zero:
      return -std::numeric_limits<double>::infinity();
    case Tag::Inf:
      return std::numeric_limits<double>::infinity();
    default:
      return static_cast<double>(e2_) * kLn2 + lm_;
  }
}

double LogReal::to_double() const {
  if (is_zero()) return 0.0;
  if (is_infinite()) return sign_ * std::numeric_limits<double>::infinity();
  if (e2_ > 1100) return sign_ * std::numeric_limits<double>::infinity();
  if (e2_ < -1120) return 0.0;
  return sign_ * std::ldexp(std::exp(lm_), static_cast<int>(e2_));
}

LogReal LogReal::operator-() const {
  LogReal r = *this;
  r.sign_ = -r.sign_;
  return r;
}

LogReal LogReal::operator*(const LogReal& o) const {
  if (is_zero() || o.is_zero()) {
    if (is_infinite() || o.is_infinite()) throw NumericsError("LogReal: 0 * inf");
    return zero();
  }
  if (is_infinite() || o.is_infinite()) return infinity(sign_ * o.sign_);
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = sign_ * o.sign_;
  r.e2_ = e2_ + o.e2_;
  r.lm_ = lm_ + o.lm_;
  r.normalize();
  return r;
}

LogReal LogReal::operator/(const LogReal& o) const {
  if (o.is_zero()) throw NumericsError("LogReal: division by zero");
  if (o.is_infinite()) {
    if (is_infinite()) throw NumericsError("LogReal: inf / inf");
    return zero();
  }
  if (is_zero()) return zero();
  if (is_infinite()) return infinity(sign_ * o.sign_);
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = sign_ * o.sign_;
  r.e2_ = e2_ - o.e2_;
  r.lm_ = lm_ - o.lm_;
  r.normalize();
  return r;
}

LogReal LogReal::operator+(const LogReal& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (is_infinite() || o.is_infinite()) {
    if (is_infinite() && o.is_infinite() && sign_ != o.sign_)
      throw NumericsError("LogReal: inf - inf");
    return infinity(is_infinite() ? sign_ : o.sign_);
  }
  const bool this_big = e2_ > o.e2_ || (e2_ == o.e2_ && lm_ >= o.lm_);
  const LogReal& big = this_big ? *this : o;
  const LogReal& sml = this_big ? o : *this;
  const double d = static_cast<double>(sml.e2_ - big.e2_) * kLn2 + (sml.lm_ - big.lm_);  // <= 0
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = big.sign_;
  r.e2_ = big.e2_;
  if (big.sign_ == sml.sign_) {
    r.lm_ = big.lm_ + std::log1p(std::exp(d));
  } else {
    const double u = -std::expm1(d);  // 1 - e^d in [0, 1]
    if (u == 0.0) return zero();
    r.lm_ = big.lm_ + std::log(u);
  }
  r.normalize();
  return r;
}

LogReal LogReal::pow(double e) const {
  if (is_zero()) {
    if (e < 0.0) throw NumericsError("LogReal: 0^negative");
    return e == 0.0 ? one() : zero();
  }
  if (sign_ < 0) throw NumericsError("LogReal: pow of negative value");
  if (is_infinite()) {
    if (e == 0.0) return one();
    return e > 0.0 ? infinity() : zero();
  }
  // split e * e2 into integer and fractional parts to keep the carry exact
  const double t = e * static_cast<double>(e2_);
  const double ti = std::floor(t);
  LogReal r;
  r.tag_ = Tag::Finite;
  r.sign_ = +1;
  r.e2_ = static_cast<std::int64_t>(ti);
  r.lm_ = (t - ti) * kLn2 + e * lm_;
  r.normalize();
  return r;
}

bool LogReal::operator<(const LogReal& o) const {
  const int s = sign(), t = o.sign();
  if (s != t) return s < t;
  if (s == 0) return false;
  bool mag_less, mag_greater;
  if (is_infinite() || o.is_infinite()) {
    mag_less = !is_infinite() && o.is_infinite();
    mag_greater = is_infinite() && !o.is_infinite();
  } else {
    mag_less = e2_ < o.e2_ || (e2_ == o.e2_ && lm_ < o.lm_);
    mag_greater = e2_ > o.e2_ || (e2_ == o.e2_ && lm_ > o.lm_);
  }
  return s > 0 ? mag_less : mag_greater;
}

std::string LogReal::to_pow10_string(int digits) const {
  if (is_zero()) return "0";
  if (is_infinite()) return sign_ > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s10^{%.*f}", sign_ < 0 ? "-" : "", digits, log10_magnitude());
  return buf;
}

LogReal min(const LogReal& a, const LogReal& b) { return a < b ? a : b; }

}  // namespace tube
