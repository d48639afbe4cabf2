#pragma once

// The five three-parameter generalizations of the Weibull lifetime model:
//
//   GG   generalized gamma (Stacy)       f = a/G(phi) mu^(a phi) t^(a phi - 1) exp(-(mu t)^a)
//   GW   generalized Weibull (Mudholkar) S = (1 - lambda (t/phi)^(1/a))^(1/lambda)
//   EW   exponentiated Weibull           F = (1 - exp(-(t/sigma)^a))^phi
//   MOW  Marshall-Olkin Weibull          S = a e / (1 - (1 - a) e),  e = exp(-lambda t^gamma)
//   EPW  extended Poisson-Weibull        S = (1 - exp(-lambda w)) / (1 - exp(-lambda)),  w = exp(-beta t^a)
//
// Every family exposes log_pdf, pdf, cdf, survival, log_survival, hazard and
// quantile. Times are in days throughout.

#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "wfit/errors.hpp"
#include "wfit/special_functions.hpp"

namespace wfit {

enum class Family { GG, GW, EW, MOW, EPW };

inline constexpr std::array<Family, 5> kAllFamilies{Family::GG, Family::GW, Family::EW,
                                                     Family::MOW, Family::EPW};

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::GG: return "GG";
    case Family::GW: return "GW";
    case Family::EW: return "EW";
    case Family::MOW: return "MOW";
    case Family::EPW: return "EPW";
  }
  return "?";
}

/// Accepts "gg", "GG", "gw", ... Throws ParameterError for anything else.
inline Family parse_family(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "gg") return Family::GG;
  if (lower == "gw") return Family::GW;
  if (lower == "ew") return Family::EW;
  if (lower == "mow") return Family::MOW;
  if (lower == "epw" || lower == "ewp") return Family::EPW;
  throw ParameterError("unknown family '" + std::string(s) + "'");
}

struct GGParams {
  static constexpr Family family = Family::GG;
  static constexpr std::array<std::string_view, 3> names{"phi", "mu", "alpha"};
  static constexpr std::array<bool, 3> positive{true, true, true};
  double phi;    // shape
  double mu;     // rate, 1/days
  double alpha;  // power shape

  std::array<double, 3> values() const { return {phi, mu, alpha}; }
  static GGParams from_values(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
};

struct GWParams {
  static constexpr Family family = Family::GW;
  static constexpr std::array<std::string_view, 3> names{"lambda", "phi", "alpha"};
  static constexpr std::array<bool, 3> positive{false, true, true};
  double lambda;  // any real; lambda > 0 bounds the support above
  double phi;     // scale, days
  double alpha;   // power shape

  std::array<double, 3> values() const { return {lambda, phi, alpha}; }
  static GWParams from_values(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
};

struct EWParams {
  static constexpr Family family = Family::EW;
  static constexpr std::array<std::string_view, 3> names{"sigma", "phi", "alpha"};
  static constexpr std::array<bool, 3> positive{true, true, true};
  double sigma;  // scale, days
  double phi;    // exponent shape
  double alpha;  // Weibull shape

  std::array<double, 3> values() const { return {sigma, phi, alpha}; }
  static EWParams from_values(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
};

struct MOWParams {
  static constexpr Family family = Family::MOW;
  static constexpr std::array<std::string_view, 3> names{"lambda", "alpha", "gamma"};
  static constexpr std::array<bool, 3> positive{true, true, true};
  double lambda;  // rate
  double alpha;   // tilt
  double gamma;   // Weibull shape

  std::array<double, 3> values() const { return {lambda, alpha, gamma}; }
  static MOWParams from_values(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
};

struct EPWParams {
  static constexpr Family family = Family::EPW;
  static constexpr std::array<std::string_view, 3> names{"lambda", "alpha", "beta"};
  static constexpr std::array<bool, 3> positive{false, true, true};
  double lambda;  // nonzero real
  double alpha;   // Weibull shape
  double beta;    // rate

  std::array<double, 3> values() const { return {lambda, alpha, beta}; }
  static EPWParams from_values(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
};

using Params = std::variant<GGParams, GWParams, EWParams, MOWParams, EPWParams>;

template <class P>
concept FamilyParams = std::is_same_v<P, GGParams> || std::is_same_v<P, GWParams> ||
                       std::is_same_v<P, EWParams> || std::is_same_v<P, MOWParams> ||
                       std::is_same_v<P, EPWParams>;

/// Below this magnitude GW lambda is evaluated through its Weibull limit.
inline constexpr double kGwLambdaZero = 1e-12;

inline Family family_of(const Params& p) {
  return std::visit([](const auto& q) { return std::decay_t<decltype(q)>::family; }, p);
}

inline std::array<double, 3> param_values(const Params& p) {
  return std::visit([](const auto& q) { return q.values(); }, p);
}

inline std::array<std::string_view, 3> param_names(Family f) {
  switch (f) {
    case Family::GG: return GGParams::names;
    case Family::GW: return GWParams::names;
    case Family::EW: return EWParams::names;
    case Family::MOW: return MOWParams::names;
    case Family::EPW: return EPWParams::names;
  }
  return GGParams::names;
}

inline Params make_params(Family f, const std::array<double, 3>& v) {
  switch (f) {
    case Family::GG: return GGParams::from_values(v);
    case Family::GW: return GWParams::from_values(v);
    case Family::EW: return EWParams::from_values(v);
    case Family::MOW: return MOWParams::from_values(v);
    case Family::EPW: return EPWParams::from_values(v);
  }
  return GGParams::from_values(v);
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline bool pos(double x) { return x > 0.0 && std::isfinite(x); }

// log|expm1(y)|, safe for large |y|.
inline double log_abs_expm1(double y) {
  if (y > 30.0) return y + std::log1p(-std::exp(-y));
  return std::log(std::abs(std::expm1(y)));
}

}  // namespace detail

inline bool is_valid(const GGParams& p) {
  return detail::pos(p.phi) && detail::pos(p.mu) && detail::pos(p.alpha);
}
inline bool is_valid(const GWParams& p) {
  return std::isfinite(p.lambda) && detail::pos(p.phi) && detail::pos(p.alpha);
}
inline bool is_valid(const EWParams& p) {
  return detail::pos(p.sigma) && detail::pos(p.phi) && detail::pos(p.alpha);
}
inline bool is_valid(const MOWParams& p) {
  return detail::pos(p.lambda) && detail::pos(p.alpha) && detail::pos(p.gamma);
}
inline bool is_valid(const EPWParams& p) {
  return std::isfinite(p.lambda) && p.lambda != 0.0 && detail::pos(p.alpha) &&
         detail::pos(p.beta);
}
inline bool is_valid(const Params& p) {
  return std::visit([](const auto& q) { return is_valid(q); }, p);
}

template <FamilyParams P>
void validate(const P& p) {
  if (!is_valid(p)) {
    std::string msg(family_name(P::family));
    msg += " parameters invalid: (";
    const auto v = p.values();
    for (std::size_t i = 0; i < 3; ++i) {
      msg += std::string(P::names[i]) + "=" + std::to_string(v[i]) + (i < 2 ? ", " : ")");
    }
    throw ParameterError(msg);
  }
}

/// Upper end of the support; +inf except for GW with lambda > 0.
template <FamilyParams P>
double support_upper(const P& p) {
  if constexpr (std::is_same_v<P, GWParams>) {
    if (p.lambda > kGwLambdaZero) return p.phi * std::pow(p.lambda, -p.alpha);
  }
  return std::numeric_limits<double>::infinity();
}

namespace detail {

template <FamilyParams P>
void check_time(const P& p, double t) {
  validate(p);
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("time must be positive and finite, got " + std::to_string(t));
  }
  if constexpr (std::is_same_v<P, GWParams>) {
    if (p.lambda > kGwLambdaZero) {
      const double z = std::pow(t / p.phi, 1.0 / p.alpha);
      if (!(p.lambda * z < 1.0)) {
        throw SupportError("t = " + std::to_string(t) + " outside GW support (0, " +
                           std::to_string(support_upper(p)) + ")");
      }
    }
  }
}

inline void check_probability(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("probability must lie in (0, 1), got " + std::to_string(u));
  }
}

// ---- GG -------------------------------------------------------------------

inline double log_pdf_unchecked(const GGParams& p, double t) {
  const double lmt = std::log(p.mu * t);
  return std::log(p.alpha) - log_gamma(p.phi) + p.alpha * p.phi * lmt - std::log(t) -
         std::exp(p.alpha * lmt);
}
inline double cdf_unchecked(const GGParams& p, double t) {
  return reg_lower_incomplete_gamma(p.phi, std::pow(p.mu * t, p.alpha));
}
inline double log_survival_unchecked(const GGParams& p, double t) {
  return std::log(reg_upper_incomplete_gamma(p.phi, std::pow(p.mu * t, p.alpha)));
}

// Solves P(phi, x) = u for x by Newton steps kept inside a bisection bracket.
inline double inverse_reg_lower_gamma(double a, double u) {
  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (reg_lower_incomplete_gamma(a, hi) < u) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("GG quantile: bracket overflow");
  }
  // Seed from the bracket midpoint, then safeguarded Newton.
  double x = 0.5 * (lo + hi);
  const double lg = log_gamma(a);
  for (int iter = 0; iter < 300; ++iter) {
    const double f = reg_lower_incomplete_gamma(a, x) - u;
    if (f == 0.0) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dens = std::exp((a - 1.0) * std::log(x) - x - lg);
    double next = x - f / dens;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(x, 1e-300)) return next;
    if (hi - lo <= 1e-15 * hi) return next;
    x = next;
  }
  return x;
}

inline double quantile_unchecked(const GGParams& p, double u) {
  const double x = inverse_reg_lower_gamma(p.phi, u);
  return std::pow(x, 1.0 / p.alpha) / p.mu;
}

// ---- GW -------------------------------------------------------------------

inline bool gw_is_weibull(const GWParams& p) { return std::abs(p.lambda) < kGwLambdaZero; }

inline double log_pdf_unchecked(const GWParams& p, double t) {
  const double lr = std::log(t / p.phi);
  const double z = std::exp(lr / p.alpha);
  const double base = -std::log(p.alpha * p.phi) + (1.0 / p.alpha - 1.0) * lr;
  if (gw_is_weibull(p)) return base - z;
  return base + (1.0 / p.lambda - 1.0) * std::log1p(-p.lambda * z);
}
inline double log_survival_unchecked(const GWParams& p, double t) {
  const double z = std::pow(t / p.phi, 1.0 / p.alpha);
  if (gw_is_weibull(p)) return -z;
  return std::log1p(-p.lambda * z) / p.lambda;
}
inline double cdf_unchecked(const GWParams& p, double t) {
  return -std::expm1(log_survival_unchecked(p, t));
}
inline double quantile_unchecked(const GWParams& p, double u) {
  if (gw_is_weibull(p)) return p.phi * std::pow(-std::log1p(-u), p.alpha);
  const double inner = -std::expm1(p.lambda * std::log1p(-u)) / p.lambda;
  return p.phi * std::pow(inner, p.alpha);
}

// ---- EW -------------------------------------------------------------------

// log(1 - exp(-z)) given log z; stays finite when z underflows.
inline double log_one_minus_exp_neg(double log_z) {
  if (log_z < -40.0) return log_z - 0.5 * std::exp(log_z);
  return std::log(-std::expm1(-std::exp(log_z)));
}

inline double log_pdf_unchecked(const EWParams& p, double t) {
  const double lr = std::log(t / p.sigma);
  const double z = std::exp(p.alpha * lr);
  return std::log(p.alpha * p.phi / p.sigma) + (p.alpha - 1.0) * lr - z +
         (p.phi - 1.0) * log_one_minus_exp_neg(p.alpha * lr);
}
// log F(t) = phi log(1 - exp(-z))
inline double log_cdf_ew(const EWParams& p, double t) {
  return p.phi * log_one_minus_exp_neg(p.alpha * std::log(t / p.sigma));
}
inline double cdf_unchecked(const EWParams& p, double t) { return std::exp(log_cdf_ew(p, t)); }
inline double log_survival_unchecked(const EWParams& p, double t) {
  return std::log(-std::expm1(log_cdf_ew(p, t)));
}
inline double quantile_unchecked(const EWParams& p, double u) {
  const double v = std::exp(std::log(u) / p.phi);
  return p.sigma * std::pow(-std::log1p(-v), 1.0 / p.alpha);
}

// ---- MOW ------------------------------------------------------------------

inline double log_pdf_unchecked(const MOWParams& p, double t) {
  const double x = p.lambda * std::pow(t, p.gamma);
  const double d = 1.0 - (1.0 - p.alpha) * std::exp(-x);
  return std::log(p.alpha * p.gamma * p.lambda) + (p.gamma - 1.0) * std::log(t) - x -
         2.0 * std::log(d);
}
inline double log_survival_unchecked(const MOWParams& p, double t) {
  const double x = p.lambda * std::pow(t, p.gamma);
  const double d = 1.0 - (1.0 - p.alpha) * std::exp(-x);
  return std::log(p.alpha) - x - std::log(d);
}
inline double cdf_unchecked(const MOWParams& p, double t) {
  const double x = p.lambda * std::pow(t, p.gamma);
  const double d = 1.0 - (1.0 - p.alpha) * std::exp(-x);
  return -std::expm1(-x) / d;
}
inline double quantile_unchecked(const MOWParams& p, double u) {
  // (1 - (1 - alpha) u) / (1 - u) = 1 + alpha u / (1 - u)
  const double x = std::log1p(p.alpha * u / (1.0 - u));
  return std::pow(x / p.lambda, 1.0 / p.gamma);
}

// ---- EPW ------------------------------------------------------------------

// log(lambda / (1 - exp(-lambda))), positive argument for either sign of lambda.
inline double epw_log_norm(double lambda) {
  return std::log(std::abs(lambda)) - detail::log_abs_expm1(-lambda);
}

inline double log_pdf_unchecked(const EPWParams& p, double t) {
  const double x = p.beta * std::pow(t, p.alpha);
  return std::log(p.alpha * p.beta) + epw_log_norm(p.lambda) + (p.alpha - 1.0) * std::log(t) - x -
         p.lambda * std::exp(-x);
}
inline double log_survival_unchecked(const EPWParams& p, double t) {
  const double w = std::exp(-p.beta * std::pow(t, p.alpha));
  return detail::log_abs_expm1(-p.lambda * w) - detail::log_abs_expm1(-p.lambda);
}
inline double cdf_unchecked(const EPWParams& p, double t) {
  // F = exp(-lambda w) (exp(-lambda (1 - w)) - 1) / (exp(-lambda) - 1)
  const double x = p.beta * std::pow(t, p.alpha);
  const double w = std::exp(-x);
  const double one_minus_w = -std::expm1(-x);
  return std::exp(-p.lambda * w + detail::log_abs_expm1(-p.lambda * one_minus_w) -
                  detail::log_abs_expm1(-p.lambda));
}
inline double quantile_unchecked(const EPWParams& p, double u) {
  // w = 1 - log(1 + u (e^lambda - 1)) / lambda, t = (-log(w) / beta)^(1/alpha)
  double g;
  if (p.lambda > 30.0) {
    g = p.lambda + std::log(u + (1.0 - u) * std::exp(-p.lambda));
  } else {
    g = std::log1p(u * std::expm1(p.lambda));
  }
  const double neg_log_w = -std::log1p(-g / p.lambda);
  return std::pow(neg_log_w / p.beta, 1.0 / p.alpha);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Family-generic evaluation

template <FamilyParams P>
double log_pdf(const P& p, double t) {
  detail::check_time(p, t);
  return detail::log_pdf_unchecked(p, t);
}

template <FamilyParams P>
double pdf(const P& p, double t) {
  return std::exp(log_pdf(p, t));
}

template <FamilyParams P>
double cdf(const P& p, double t) {
  detail::check_time(p, t);
  return detail::cdf_unchecked(p, t);
}

template <FamilyParams P>
double log_survival(const P& p, double t) {
  detail::check_time(p, t);
  return detail::log_survival_unchecked(p, t);
}

template <FamilyParams P>
double survival(const P& p, double t) {
  detail::check_time(p, t);
  if constexpr (std::is_same_v<P, GGParams>) {
    return reg_upper_incomplete_gamma(p.phi, std::pow(p.mu * t, p.alpha));
  } else {
    return std::exp(detail::log_survival_unchecked(p, t));
  }
}

/// f(t) / S(t). Throws DomainError where S(t) underflows to zero.
template <FamilyParams P>
double hazard(const P& p, double t) {
  detail::check_time(p, t);
  const double log_s = detail::log_survival_unchecked(p, t);
  if (!std::isfinite(log_s) || std::exp(log_s) == 0.0) {
    throw DomainError("hazard: survival underflows at t = " + std::to_string(t));
  }
  return std::exp(detail::log_pdf_unchecked(p, t) - log_s);
}

template <FamilyParams P>
double quantile(const P& p, double u) {
  validate(p);
  detail::check_probability(u);
  return detail::quantile_unchecked(p, u);
}

inline double log_pdf(const Params& p, double t) {
  return std::visit([t](const auto& q) { return log_pdf(q, t); }, p);
}
inline double pdf(const Params& p, double t) {
  return std::visit([t](const auto& q) { return pdf(q, t); }, p);
}
inline double cdf(const Params& p, double t) {
  return std::visit([t](const auto& q) { return cdf(q, t); }, p);
}
inline double survival(const Params& p, double t) {
  return std::visit([t](const auto& q) { return survival(q, t); }, p);
}
inline double log_survival(const Params& p, double t) {
  return std::visit([t](const auto& q) { return log_survival(q, t); }, p);
}
inline double hazard(const Params& p, double t) {
  return std::visit([t](const auto& q) { return hazard(q, t); }, p);
}
inline double quantile(const Params& p, double u) {
  return std::visit([u](const auto& q) { return quantile(q, u); }, p);
}
inline double support_upper(const Params& p) {
  return std::visit([](const auto& q) { return support_upper(q); }, p);
}

// ---------------------------------------------------------------------------
// Moments

struct MeanVariance {
  double mean;      // days
  double variance;  // days^2
};

inline MeanVariance gg_mean_variance(const GGParams& p) {
  validate(p);
  const double lg = log_gamma(p.phi);
  const double r1 = std::exp(log_gamma(p.phi + 1.0 / p.alpha) - lg);
  const double r2 = std::exp(log_gamma(p.phi + 2.0 / p.alpha) - lg);
  if (!std::isfinite(r1) || !std::isfinite(r2)) {
    throw std::overflow_error("gg_mean_variance: gamma ratio exceeds double range");
  }
  const double mean = r1 / p.mu;
  return {mean, (r2 - r1 * r1) / (p.mu * p.mu)};
}

}  // namespace wfit
