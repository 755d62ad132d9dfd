#pragma once

#include <cmath>
#include <string>

#include "polysl2/error.hpp"

namespace polysl2 {

inline double log_factorial(int n) {
  if (n < 0) throw Error(ErrorCode::invalid_argument, "log_factorial of a negative integer");
  return std::lgamma(n + 1.0);
}

/// Magnitude and sign of a real number kept apart, for products of
/// factorials and Pochhammer symbols that overflow doubles.
struct SignedLog {
  double log_abs = 0.0;  // log|x|; -inf for x == 0
  int sign = 1;          // 0 for x == 0

  static SignedLog of(double x) {
    if (x == 0.0) return {-INFINITY, 0};
    return {std::log(std::abs(x)), x < 0 ? -1 : 1};
  }
  SignedLog operator*(const SignedLog& o) const { return {log_abs + o.log_abs, sign * o.sign}; }
  SignedLog operator/(const SignedLog& o) const { return {log_abs - o.log_abs, sign * o.sign}; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// (x)_m = x (x+1) ... (x+m-1) in signed log form.
inline SignedLog log_pochhammer(double x, int m) {
  SignedLog out{0.0, 1};
  for (int i = 0; i < m; ++i) out = out * SignedLog::of(x + i);
  return out;
}

/// Terminating Gauss series 2F1(-n, b; c; x) = sum_{m=0}^{n} (-n)_m (b)_m / ((c)_m m!) x^m
/// with neg_n = -n <= 0. A zero of (c)_m before termination is a pole.
template <class Real = double>
Real hypergeometric_terminating(int neg_n, Real b, Real c, Real x) {
  if (neg_n > 0) throw Error(ErrorCode::invalid_argument, "hypergeometric_terminating: first parameter must be <= 0");
  const int n = -neg_n;
  for (int m = 0; m < n; ++m)
    if (c + m == Real(0))
      throw Error(ErrorCode::hypergeometric_pole,
                  "hypergeometric_terminating: (c)_m vanishes before the series terminates (c = " +
                      std::to_string(static_cast<double>(c)) + ")");
  Real sum = 1, term = 1;
  for (int m = 0; m < n; ++m) {
    term *= (Real(neg_n) + m) * (b + m) / ((c + m) * Real(m + 1)) * x;
    sum += term;
  }
  return sum;
}

/// 2F1(-n, b; c; x) / Gamma(c) for integer c. For c <= 0 this is the finite
/// limit (-n)_k (b)_k / k! x^k 2F1(-n+k, b+k; k+1; x) with k = 1 - c.
template <class Real = double>
Real hypergeometric_terminating_regularized(int neg_n, Real b, int c, Real x) {
  if (c >= 1) return hypergeometric_terminating<Real>(neg_n, b, Real(c), x) / std::tgamma(Real(c));
  const int k = 1 - c;
  if (k > -neg_n) return Real(0);  // (-n)_k = 0
  Real pre = 1;
  for (int i = 0; i < k; ++i) pre *= (Real(neg_n) + i) * (b + i);
  for (int i = 1; i <= k; ++i) pre /= Real(i);
  return pre * std::pow(x, k) * hypergeometric_terminating<Real>(neg_n + k, b + k, Real(k + 1), x);
}

}  // namespace polysl2
