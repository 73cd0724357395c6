#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>

namespace spinchain {

// log(2 cosh x), overflow-safe for any representable x.
inline double log_2cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a));
}

// log(2 |sinh x|); -inf at x = 0.
inline double log_2sinh_abs(double x) {
  const double a = std::abs(x);
  if (a == 0.0) return -std::numeric_limits<double>::infinity();
  return a + std::log1p(-std::exp(-2.0 * a));
}

// A real number carried as sign * exp(log_magnitude).  Partition factors
// reach exp(1e6) in large-L sweeps, far beyond double range, so every
// product and signed sum in the partition/fcs modules goes through this.
class LogScaledReal {
 public:
  constexpr LogScaledReal() = default;  // exact zero

  static LogScaledReal from_value(double v) {
    if (v == 0.0) return {};
    return LogScaledReal(v > 0 ? 1 : -1, std::log(std::abs(v)));
  }
  static LogScaledReal from_log(double log_magnitude, int sign = 1) {
    if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity())
      return {};
    return LogScaledReal(sign > 0 ? 1 : -1, log_magnitude);
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }

  // Natural log of |value|; -inf for zero.
  double log_magnitude() const { return log_; }

  // May overflow to +-inf for huge magnitudes; intended for desk-scale use.
  double value() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_); }

  LogScaledReal operator-() const { return LogScaledReal(-sign_, log_); }

  friend LogScaledReal operator*(const LogScaledReal& a, const LogScaledReal& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return {};
    return LogScaledReal(a.sign_ * b.sign_, a.log_ + b.log_);
  }
  friend LogScaledReal operator/(const LogScaledReal& a, const LogScaledReal& b) {
    if (a.sign_ == 0) return {};
    return LogScaledReal(a.sign_ * b.sign_, a.log_ - b.log_);
  }
  friend LogScaledReal operator+(const LogScaledReal& a, const LogScaledReal& b);
  friend LogScaledReal operator-(const LogScaledReal& a, const LogScaledReal& b);

 private:
  constexpr LogScaledReal(int s, double l) : sign_(s), log_(l) {}
  int sign_ = 0;
  double log_ = -std::numeric_limits<double>::infinity();
};

struct SignedSum {
  LogScaledReal value;
  // Set when the summands cancel below cancel_tol of the largest magnitude;
  // the returned value then carries few or no correct digits.
  bool cancellation = false;
};

// Signed log-sum-exp anchored at the largest magnitude.
inline SignedSum log_sum_signed(std::span<const LogScaledReal> terms,
                                double cancel_tol = 1e-12) {
  double anchor = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (!t.is_zero() && t.log_magnitude() > anchor) anchor = t.log_magnitude();
  if (anchor == -std::numeric_limits<double>::infinity()) return {};

  double acc = 0.0;
  for (const auto& t : terms)
    if (!t.is_zero()) acc += t.sign() * std::exp(t.log_magnitude() - anchor);

  SignedSum out;
  out.cancellation = std::abs(acc) < cancel_tol;
  if (acc != 0.0)
    out.value = LogScaledReal::from_log(anchor + std::log(std::abs(acc)),
                                        acc > 0 ? 1 : -1);
  return out;
}

inline LogScaledReal operator+(const LogScaledReal& a, const LogScaledReal& b) {
  const LogScaledReal terms[2] = {a, b};
  return log_sum_signed(terms).value;
}
inline LogScaledReal operator-(const LogScaledReal& a, const LogScaledReal& b) {
  return a + (-b);
}

// Complex number carried as value * exp(log_scale).  |value| is pulled back
// into [1e-150, 1e150] after each multiply, so long per-mode products neither
// overflow nor lose the phase; inside that window the arithmetic is plain
// complex multiplication, bit-identical to the naive path.
struct ScaledComplex {
  std::complex<double> value{1.0, 0.0};
  double log_scale = 0.0;

  static ScaledComplex one() { return {}; }
  static ScaledComplex from(std::complex<double> v, double log_scale = 0.0) {
    ScaledComplex s{v, log_scale};
    s.normalize();
    return s;
  }

  bool is_zero() const { return value == std::complex<double>(0.0, 0.0); }

  void normalize() {
    const double m = std::abs(value);
    if (m == 0.0) {
      log_scale = 0.0;
      return;
    }
    if (m > 1e150 || m < 1e-150) {
      value /= m;
      log_scale += std::log(m);
    }
  }

  ScaledComplex& operator*=(const ScaledComplex& o) {
    value *= o.value;
    log_scale += o.log_scale;
    normalize();
    return *this;
  }
  ScaledComplex& operator*=(std::complex<double> f) {
    value *= f;
    normalize();
    return *this;
  }

  // value * exp(log_scale); only for desk-scale magnitudes.
  std::complex<double> descaled() const { return value * std::exp(log_scale); }
};

inline std::complex<double> ratio(const ScaledComplex& num, const ScaledComplex& den) {
  return num.value / den.value * std::exp(num.log_scale - den.log_scale);
}

// Anchored sum; zero terms are skipped.
inline ScaledComplex scaled_sum(std::span<const ScaledComplex> terms) {
  double anchor = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (!t.is_zero() && t.log_scale > anchor) anchor = t.log_scale;
  if (anchor == -std::numeric_limits<double>::infinity())
    return ScaledComplex{{0.0, 0.0}, 0.0};

  std::complex<double> acc{0.0, 0.0};
  for (const auto& t : terms)
    if (!t.is_zero()) acc += t.value * std::exp(t.log_scale - anchor);
  return ScaledComplex::from(acc, anchor);
}

}  // namespace spinchain
