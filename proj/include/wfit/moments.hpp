#pragma once

#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/special_functions.hpp"

namespace wfit {

/// E[T^k] for the exponentiated Weibull, as the integral of Q(u)^k over (0, 1).
/// Throws ConvergenceError when the quadrature error estimate exceeds 1e-8 (relative).
inline double ew_kth_moment(const EWParams& p, int k) {
  validate(p);
  if (k < 1) throw DomainError("ew_kth_moment: k must be >= 1");
  boost::math::quadrature::tanh_sinh<double> integrator;
  // xc is the exact distance to the nearer endpoint; near u = 1 it carries 1 - u without
  // cancellation: 1 - u^(1/phi) = -expm1(log1p(-(1 - u)) / phi).
  const auto integrand = [&](double u, double xc) {
    const double log_u = u < 0.5 ? std::log(u) : std::log1p(-xc);
    const double one_minus_v = -std::expm1(log_u / p.phi);
    if (!(one_minus_v > 0.0) || !(log_u < 0.0)) return 0.0;
    const double w = -std::log(one_minus_v);
    return std::exp(k * (std::log(p.sigma) + std::log(w) / p.alpha));
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(integrand, 0.0, 1.0, 1e-12, &error, &l1);
  if (!std::isfinite(value) || error > 1e-8 * std::max(1.0, std::abs(value))) {
    throw ConvergenceError("ew_kth_moment: quadrature did not reach tolerance 1e-8");
  }
  return value;
}

struct SeriesMoment {
  double value;
  int terms;               // terms summed (excluding the leading 1)
  double truncation_bound; // estimate of the neglected tail
};

/// Series form of the same moment:
///   E[T^k] = phi sigma^k Gamma(k/alpha + 1) (1 + sum_{i>=1} a_i (i+1)^-(k/alpha + 1)),
///   a_i = (-1)^i (phi-1)(phi-2)...(phi-i) / i!.
/// The sum terminates for integer phi. Otherwise terms keep one sign once i > phi and decay
/// like i^-(phi + k/alpha + 1), so the neglected tail after N terms is bounded by
/// |term_N| * N / (phi + k/alpha).
inline SeriesMoment ew_kth_moment_series(const EWParams& p, int k, int max_terms = 10'000) {
  validate(p);
  if (k < 1) throw DomainError("ew_kth_moment_series: k must be >= 1");
  const double expo = k / p.alpha + 1.0;
  double a = 1.0;
  double sum = 1.0;
  double last = 0.0;
  int i = 1;
  for (; i <= max_terms; ++i) {
    a *= -(p.phi - static_cast<double>(i)) / static_cast<double>(i);
    if (a == 0.0) break;
    last = a * std::pow(static_cast<double>(i + 1), -expo);
    sum += last;
  }
  const int used = std::min(i, max_terms);
  const double bound =
      (a == 0.0) ? 0.0 : std::abs(last) * used / std::max(p.phi + k / p.alpha, 1e-12);
  const double scale =
      p.phi * std::exp(k * std::log(p.sigma) + log_gamma(k / p.alpha + 1.0));
  return {scale * sum, used, scale * bound};
}

}  // namespace wfit
