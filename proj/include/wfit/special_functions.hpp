#pragma once

// Scalar special functions used by the generalized gamma family and the
// information matrices. All functions are pure and reentrant (no use of the
// global `signgam` that std::lgamma writes).

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wfit/errors.hpp"

namespace wfit {

namespace detail {

inline void require_positive_finite(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

// Stirling series for ln Gamma(x), x >= 10. Truncation error < 1e-16.
inline double log_gamma_stirling(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 -
             inv2 * (1.0 / 360.0 -
                     inv2 * (1.0 / 1260.0 -
                             inv2 * (1.0 / 1680.0 -
                                     inv2 * (1.0 / 1188.0 -
                                             inv2 * (691.0 / 360360.0 - inv2 * (1.0 / 156.0)))))));
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  detail::require_positive_finite(x, "log_gamma");
  if (x >= 10.0) return detail::log_gamma_stirling(x);
  // Shift up to the Stirling region: ln G(x) = ln G(x + m) - ln(x (x+1) ... (x+m-1)).
  double product = 1.0;
  double shifted = x;
  while (shifted < 10.0) {
    product *= shifted;
    shifted += 1.0;
  }
  return detail::log_gamma_stirling(shifted) - std::log(product);
}

/// psi(x) = d/dx ln Gamma(x). Upward recurrence to x >= 10, then the asymptotic series.
inline double digamma(double x) {
  detail::require_positive_finite(x, "digamma");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 -
                                              inv2 * (691.0 / 32760.0 - inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - tail;
}

/// psi'(x). Same recurrence/asymptotic split as digamma.
inline double trigamma(double x) {
  detail::require_positive_finite(x, "trigamma");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli numbers B2..B14.
  const double tail =
      inv * inv2 *
      (1.0 / 6.0 -
       inv2 * (1.0 / 30.0 -
               inv2 * (1.0 / 42.0 -
                       inv2 * (1.0 / 30.0 -
                               inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0 - inv2 * (7.0 / 6.0)))))));
  return acc + inv + 0.5 * inv2 + tail;
}

namespace detail {

inline void check_incomplete_gamma_args(double a, double x, const char* fn) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(fn) + ": shape must be positive and finite");
  }
  if (!(x >= 0.0) || std::isnan(x)) {
    throw DomainError(std::string(fn) + ": x must be non-negative");
  }
}

// exp(-x + a ln x - ln Gamma(a)), the common prefactor of both expansions.
inline double incomplete_gamma_prefactor(double a, double x) {
  return std::exp(-x + a * std::log(x) - log_gamma(a));
}

// P(a, x) by the power series; valid and fast for x < a + 1.
inline double lower_gamma_series(double a, double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double denom = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < 1'000'000; ++n) {
    denom += 1.0;
    term *= x / denom;
    sum += term;
    if (std::abs(term) < std::abs(sum) * eps) {
      return sum * incomplete_gamma_prefactor(a, x);
    }
  }
  throw ConvergenceError("reg_lower_incomplete_gamma: series did not converge");
}

// Q(a, x) by the modified Lentz continued fraction; valid for x >= a + 1.
inline double upper_gamma_continued_fraction(double a, double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1'000'000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) return h * incomplete_gamma_prefactor(a, x);
  }
  throw ConvergenceError("reg_upper_incomplete_gamma: continued fraction did not converge");
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
inline double reg_lower_incomplete_gamma(double a, double x) {
  detail::check_incomplete_gamma_args(a, x, "reg_lower_incomplete_gamma");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::lower_gamma_series(a, x);
  return 1.0 - detail::upper_gamma_continued_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double reg_upper_incomplete_gamma(double a, double x) {
  detail::check_incomplete_gamma_args(a, x, "reg_upper_incomplete_gamma");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::lower_gamma_series(a, x);
  return detail::upper_gamma_continued_fraction(a, x);
}

}  // namespace wfit
