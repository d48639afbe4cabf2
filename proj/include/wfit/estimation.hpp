#pragma once

// Maximum-likelihood fitting for the five lifetime families.
//
// log_likelihood() evaluates the closed-form sums for each family. score()
// returns analytic partial derivatives (central differences for GW, whose
// score equations are not used in practice). fit_mle() maximizes the
// log-likelihood with a multi-start Nelder-Mead search over transformed
// coordinates: log for strictly positive parameters, identity for the real
// lambda of GW and EPW.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/nelder_mead.hpp"
#include "wfit/rng.hpp"
#include "wfit/sample.hpp"
#include "wfit/special_functions.hpp"

namespace wfit {

using Vector3 = std::array<double, 3>;
using Matrix3 = Eigen::Matrix3d;

struct Interval {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();

  double width() const { return upper - lower; }
  bool contains(double x) const { return lower <= x && x <= upper; }
  bool overlaps(const Interval& o) const { return lower <= o.upper && o.lower <= upper; }
};

struct OptimizerConfig {
  int max_iter = 5000;
  double tol = 1e-9;
  int n_starts = 8;
  std::uint64_t seed = 20150101;

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("OptimizerConfig: max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("OptimizerConfig: tol must be > 0");
    if (n_starts < 1) throw std::invalid_argument("OptimizerConfig: n_starts must be >= 1");
  }
};

struct FitResult {
  Family family = Family::GG;
  Params params = GGParams{1.0, 1.0, 1.0};
  double loglik = -std::numeric_limits<double>::infinity();
  double score_residual = std::numeric_limits<double>::infinity();
  Matrix3 observed_info = Matrix3::Zero();
  Vector3 std_errors{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
  std::array<Interval, 3> wald_ci_95{};
  bool converged = false;            // simplex, score and information checks all pass
  bool optimizer_converged = false;  // simplex criterion alone
  bool at_search_boundary = false;  // best point sits on the edge of the search box
  int n_restarts_used = 0;
  int evaluations = 0;
  std::size_t n = 0;
  std::string diagnostics;
};

// ---------------------------------------------------------------------------
// Log-likelihood

namespace detail {

inline double loglik_unchecked(const GGParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_pow = 0.0;
  for (double t : s.values()) sum_pow += std::pow(p.mu * t, p.alpha);
  return n * std::log(p.alpha) - n * log_gamma(p.phi) + n * p.alpha * p.phi * std::log(p.mu) +
         (p.alpha * p.phi - 1.0) * s.sum_log() - sum_pow;
}

inline double loglik_unchecked(const GWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  const bool weibull = std::abs(p.lambda) < kGwLambdaZero;
  double sum_tail = 0.0;
  for (double t : s.values()) {
    const double z = std::pow(t / p.phi, 1.0 / p.alpha);
    if (weibull) {
      sum_tail -= z;
    } else {
      const double arg = p.lambda * z;
      if (!(arg < 1.0)) return -std::numeric_limits<double>::infinity();
      sum_tail += (1.0 / p.lambda - 1.0) * std::log1p(-arg);
    }
  }
  return sum_tail + (1.0 / p.alpha - 1.0) * (s.sum_log() - n * std::log(p.phi)) -
         n * std::log(p.alpha * p.phi);
}

inline double loglik_unchecked(const EWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_z = 0.0;
  double sum_log_f = 0.0;
  for (double t : s.values()) {
    const double z = std::pow(t / p.sigma, p.alpha);
    sum_z += z;
    sum_log_f += std::log(-std::expm1(-z));
  }
  return n * std::log(p.alpha * p.phi) - n * p.alpha * std::log(p.sigma) +
         (p.alpha - 1.0) * s.sum_log() - sum_z + (p.phi - 1.0) * sum_log_f;
}

inline double loglik_unchecked(const MOWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_x = 0.0;
  double sum_log_d = 0.0;
  for (double t : s.values()) {
    const double x = p.lambda * std::pow(t, p.gamma);
    sum_x += x;
    sum_log_d += std::log(1.0 - (1.0 - p.alpha) * std::exp(-x));
  }
  return n * (std::log(p.alpha) + std::log(p.gamma) + std::log(p.lambda)) +
         (p.gamma - 1.0) * s.sum_log() - sum_x - 2.0 * sum_log_d;
}

inline double loglik_unchecked(const EPWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_x = 0.0;
  double sum_w = 0.0;
  for (double t : s.values()) {
    const double x = p.beta * std::pow(t, p.alpha);
    sum_x += x;
    sum_w += std::exp(-x);
  }
  return n * (std::log(p.alpha * p.beta) + epw_log_norm(p.lambda)) + (p.alpha - 1.0) * s.sum_log() -
         sum_x - p.lambda * sum_w;
}

/// -inf for invalid parameters or support violations; used as the optimizer objective.
template <FamilyParams P>
double loglik_or_neg_inf(const P& p, const Sample& s) {
  if (!is_valid(p)) return -std::numeric_limits<double>::infinity();
  const double v = loglik_unchecked(p, s);
  return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
}

inline double loglik_or_neg_inf(const Params& p, const Sample& s) {
  return std::visit([&](const auto& q) { return loglik_or_neg_inf(q, s); }, p);
}

}  // namespace detail

template <FamilyParams P>
double log_likelihood(const P& p, const Sample& s) {
  validate(p);
  if constexpr (std::is_same_v<P, GWParams>) {
    if (p.lambda > kGwLambdaZero && !(s.max() < support_upper(p))) {
      throw SupportError("GW log-likelihood: max(sample) = " + std::to_string(s.max()) +
                         " is outside the support bound " + std::to_string(support_upper(p)));
    }
  }
  return detail::loglik_unchecked(p, s);
}

inline double log_likelihood(const Params& p, const Sample& s) {
  return std::visit([&](const auto& q) { return log_likelihood(q, s); }, p);
}

// ---------------------------------------------------------------------------
// Score

namespace detail {

inline Vector3 finite_difference_gradient(const Params& p, const Sample& s) {
  const Family f = family_of(p);
  const Vector3 v = param_values(p);
  Vector3 g{};
  for (std::size_t j = 0; j < 3; ++j) {
    double h = 1e-6 * std::max(1.0, std::abs(v[j]));
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector3 up = v, dn = v;
      up[j] += h;
      dn[j] -= h;
      const double fu = loglik_or_neg_inf(make_params(f, up), s);
      const double fd = loglik_or_neg_inf(make_params(f, dn), s);
      if (std::isfinite(fu) && std::isfinite(fd)) {
        g[j] = (fu - fd) / (2.0 * h);
        break;
      }
      h *= 0.1;
      g[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return g;
}

inline Vector3 score_impl(const GGParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_w = 0.0;
  double sum_w_log = 0.0;
  for (double t : s.values()) {
    const double lmt = std::log(p.mu * t);
    const double w = std::exp(p.alpha * lmt);
    sum_w += w;
    sum_w_log += w * lmt;
  }
  const double log_mu = std::log(p.mu);
  return {
      -n * digamma(p.phi) + n * p.alpha * log_mu + p.alpha * s.sum_log(),
      n * p.alpha * p.phi / p.mu - p.alpha * sum_w / p.mu,
      n / p.alpha + n * p.phi * log_mu + p.phi * s.sum_log() - sum_w_log,
  };
}

inline Vector3 score_impl(const GWParams& p, const Sample& s) {
  return finite_difference_gradient(p, s);
}

inline Vector3 score_impl(const EWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_z = 0.0, sum_ratio = 0.0, sum_log_f = 0.0;
  double sum_lr = 0.0, sum_z_lr = 0.0, sum_ratio_lr = 0.0;
  for (double t : s.values()) {
    const double lr = std::log(t / p.sigma);
    const double z = std::exp(p.alpha * lr);
    const double ratio = z / std::expm1(z);  // z / (e^z - 1)
    sum_z += z;
    sum_ratio += ratio;
    sum_log_f += std::log(-std::expm1(-z));
    sum_lr += lr;
    sum_z_lr += z * lr;
    sum_ratio_lr += ratio * lr;
  }
  return {
      (p.alpha / p.sigma) * (-n + sum_z - (p.phi - 1.0) * sum_ratio),
      n / p.phi + sum_log_f,
      n / p.alpha + sum_lr - sum_z_lr + (p.phi - 1.0) * sum_ratio_lr,
  };
}

inline Vector3 score_impl(const MOWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_tg = 0.0, sum_e_d = 0.0, sum_tg_e_d = 0.0, sum_tg_log = 0.0, sum_tg_log_e_d = 0.0;
  for (double t : s.values()) {
    const double lt = std::log(t);
    const double tg = std::pow(t, p.gamma);
    const double e = std::exp(-p.lambda * tg);
    const double d = 1.0 - (1.0 - p.alpha) * e;
    sum_tg += tg;
    sum_e_d += e / d;
    sum_tg_e_d += tg * e / d;
    sum_tg_log += tg * lt;
    sum_tg_log_e_d += tg * lt * e / d;
  }
  return {
      n / p.lambda - sum_tg - 2.0 * (1.0 - p.alpha) * sum_tg_e_d,
      n / p.alpha - 2.0 * sum_e_d,
      n / p.gamma + s.sum_log() - p.lambda * sum_tg_log -
          2.0 * (1.0 - p.alpha) * p.lambda * sum_tg_log_e_d,
  };
}

inline Vector3 score_impl(const EPWParams& p, const Sample& s) {
  const double n = static_cast<double>(s.size());
  double sum_w = 0.0, sum_ta = 0.0, sum_ta_w = 0.0, sum_ta_log = 0.0, sum_ta_log_w = 0.0;
  for (double t : s.values()) {
    const double lt = std::log(t);
    const double ta = std::pow(t, p.alpha);
    const double w = std::exp(-p.beta * ta);
    sum_w += w;
    sum_ta += ta;
    sum_ta_w += ta * w;
    sum_ta_log += ta * lt;
    sum_ta_log_w += ta * lt * w;
  }
  return {
      n / p.lambda - n / std::expm1(p.lambda) - sum_w,
      n / p.alpha + s.sum_log() - p.beta * sum_ta_log + p.beta * p.lambda * sum_ta_log_w,
      n / p.beta - sum_ta + p.lambda * sum_ta_w,
  };
}

}  // namespace detail

/// Partial derivatives of the log-likelihood, in the family's parameter order.
template <FamilyParams P>
Vector3 score(const P& p, const Sample& s) {
  log_likelihood(p, s);  // validates parameters and support
  return detail::score_impl(p, s);
}

inline Vector3 score(const Params& p, const Sample& s) {
  return std::visit([&](const auto& q) { return score(q, s); }, p);
}

// ---------------------------------------------------------------------------
// Generalized gamma profile equations

struct GGProfile {
  double mu_hat;
  double phi_hat;
  double alpha_residual;
};

/// Closed-form mu(alpha) and phi(alpha) from the mu and alpha score equations, and the
/// residual of the phi equation  n alpha log(mu) + alpha sum log t - n psi(phi).
inline GGProfile gg_profile_equations(double alpha, const Sample& s) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("gg_profile_equations: alpha must be positive");
  }
  const double n = static_cast<double>(s.size());
  double sum_pow = 0.0;
  double sum_pow_log = 0.0;
  for (double t : s.values()) {
    const double ta = std::pow(t, alpha);
    sum_pow += ta;
    sum_pow_log += ta * std::log(t);
  }
  const double spread = sum_pow_log - sum_pow / n * s.sum_log();
  if (!(spread > 0.0) || s.distinct_count() < 2) {
    throw DegenerateSampleError("gg_profile_equations: sample has no spread");
  }
  const double phi_hat = sum_pow / (alpha * spread);
  const double mu_hat = std::pow(n / (alpha * spread), 1.0 / alpha);
  const double residual =
      n * alpha * std::log(mu_hat) + alpha * s.sum_log() - n * digamma(phi_hat);
  return {mu_hat, phi_hat, residual};
}

/// GG maximum likelihood through a one-dimensional root search of the profile residual in
/// alpha over [alpha_lo, alpha_hi]. Among sign changes found on a log grid, the root with the
/// largest log-likelihood is returned.
inline std::optional<GGParams> fit_gg_profile(const Sample& s, double alpha_lo = 1e-2,
                                              double alpha_hi = 50.0, int grid = 400) {
  auto residual = [&](double a) { return gg_profile_equations(a, s).alpha_residual; };
  std::optional<GGParams> best;
  double best_ll = -std::numeric_limits<double>::infinity();
  double prev_a = alpha_lo;
  double prev_r = residual(prev_a);
  for (int i = 1; i <= grid; ++i) {
    const double a = alpha_lo * std::pow(alpha_hi / alpha_lo, static_cast<double>(i) / grid);
    const double r = residual(a);
    if (std::isfinite(r) && std::isfinite(prev_r) && (r == 0.0 || (r > 0.0) != (prev_r > 0.0))) {
      double lo = prev_a, hi = a, rlo = prev_r;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = residual(mid);
        if ((rm > 0.0) == (rlo > 0.0)) {
          lo = mid;
          rlo = rm;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      const auto prof = gg_profile_equations(root, s);
      const GGParams cand{prof.phi_hat, prof.mu_hat, root};
      const double ll = detail::loglik_or_neg_inf(cand, s);
      if (ll > best_ll) {
        best_ll = ll;
        best = cand;
      }
    }
    prev_a = a;
    prev_r = r;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Information matrices

/// Negative Hessian of the log-likelihood by central differences, step
/// h_j = max(1e-5, 1e-5 |theta_j|), symmetrized. Steps are shrunk where a
/// stencil point leaves the parameter space or the support.
inline Matrix3 observed_information(const Params& p, const Sample& s) {
  log_likelihood(p, s);
  const Family f = family_of(p);
  const Vector3 v = param_values(p);
  auto ll = [&](const Vector3& x) { return detail::loglik_or_neg_inf(make_params(f, x), s); };

  Vector3 h{};
  for (std::size_t j = 0; j < 3; ++j) h[j] = std::max(1e-5, 1e-5 * std::abs(v[j]));

  for (int attempt = 0; attempt < 10; ++attempt) {
    const double f0 = ll(v);
    Matrix3 hess;
    bool finite = true;
    for (std::size_t i = 0; i < 3 && finite; ++i) {
      for (std::size_t j = i; j < 3 && finite; ++j) {
        double val;
        if (i == j) {
          Vector3 up = v, dn = v;
          up[i] += h[i];
          dn[i] -= h[i];
          val = (ll(up) - 2.0 * f0 + ll(dn)) / (h[i] * h[i]);
        } else {
          Vector3 pp = v, pm = v, mp = v, mm = v;
          pp[i] += h[i]; pp[j] += h[j];
          pm[i] += h[i]; pm[j] -= h[j];
          mp[i] -= h[i]; mp[j] += h[j];
          mm[i] -= h[i]; mm[j] -= h[j];
          val = (ll(pp) - ll(pm) - ll(mp) + ll(mm)) / (4.0 * h[i] * h[j]);
        }
        finite = std::isfinite(val);
        hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val;
        hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = val;
      }
    }
    if (finite) {
      const Matrix3 info = -hess;
      return 0.5 * (info + info.transpose());
    }
    for (auto& x : h) x *= 0.1;
  }
  throw DomainError("observed_information: no finite difference stencil fits inside the support");
}

/// Per-observation expected information of the generalized gamma in the
/// parameter order (alpha, mu, phi).
///
///   [ (1 + 2 psi + phi psi' + phi psi^2) / a^2    (1 + phi psi) / mu    -psi / a ]
///   [ (1 + phi psi) / mu                          phi a^2 / mu^2        -a / mu  ]
///   [ -psi / a                                    -a / mu               psi'     ]
///
/// with psi = digamma(phi), psi' = trigamma(phi).
inline Matrix3 gg_fisher_information(const GGParams& p) {
  validate(p);
  const double a = p.alpha, mu = p.mu, phi = p.phi;
  const double psi = digamma(phi);
  const double psi1 = trigamma(phi);
  Matrix3 m;
  m(0, 0) = (1.0 + 2.0 * psi + phi * psi1 + phi * psi * psi) / (a * a);
  m(0, 1) = m(1, 0) = (1.0 + phi * psi) / mu;
  m(0, 2) = m(2, 0) = -psi / a;
  m(1, 1) = phi * a * a / (mu * mu);
  m(1, 2) = m(2, 1) = -a / mu;
  m(2, 2) = psi1;
  return m;
}

/// Standard errors from the inverse of an information matrix. Throws SingularMatrixError when
/// the matrix is not invertible or has a non-positive variance on the diagonal.
inline Vector3 standard_errors(const Matrix3& info) {
  Eigen::FullPivLU<Matrix3> lu(info);
  if (!lu.isInvertible()) throw SingularMatrixError("information matrix is singular");
  const Matrix3 cov = lu.inverse();
  Vector3 se{};
  for (Eigen::Index j = 0; j < 3; ++j) {
    if (!(cov(j, j) > 0.0) || !std::isfinite(cov(j, j))) {
      throw SingularMatrixError("information matrix inverse has a non-positive variance");
    }
    se[static_cast<std::size_t>(j)] = std::sqrt(cov(j, j));
  }
  return se;
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

/// theta_j +/- z_{(1+level)/2} SE_j. level = 0 gives point intervals.
inline std::array<Interval, 3> wald_intervals(const Vector3& estimate, const Vector3& se,
                                              double level) {
  if (!(level >= 0.0 && level < 1.0)) throw DomainError("wald_intervals: level must be in [0, 1)");
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + level));
  std::array<Interval, 3> out{};
  for (std::size_t j = 0; j < 3; ++j) {
    if (!std::isfinite(se[j])) throw SingularMatrixError("wald_intervals: standard error undefined");
    out[j] = {estimate[j] - z * se[j], estimate[j] + z * se[j]};
  }
  return out;
}

inline std::array<Interval, 3> wald_intervals(const FitResult& fit, double level) {
  if (!fit.converged) throw ConvergenceError("wald_intervals: fit did not converge");
  return wald_intervals(param_values(fit.params), standard_errors(fit.observed_info), level);
}

// ---------------------------------------------------------------------------
// Fitting

namespace detail {

inline constexpr double kMaxLogCoordinate = 30.0;  // positive parameters kept in [e^-30, e^30]

inline Vector3 to_search(Family f, const Vector3& v) {
  const auto positive = [&] {
    switch (f) {
      case Family::GW: return GWParams::positive;
      case Family::EPW: return EPWParams::positive;
      default: return GGParams::positive;
    }
  }();
  Vector3 q{};
  for (std::size_t j = 0; j < 3; ++j) q[j] = positive[j] ? std::log(v[j]) : v[j];
  return q;
}

inline bool near_search_edge(Family f, const Vector3& q) {
  const bool real_first = f == Family::GW || f == Family::EPW;
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == 0 && real_first) {
      if (std::abs(q[j]) > 1e3 - 1.0) return true;
      if (f == Family::GW && q[j] > 1.0 - 1e-6) return true;
    } else if (std::abs(q[j]) > kMaxLogCoordinate - 0.5) {
      return true;
    }
  }
  return false;
}

inline std::optional<Vector3> from_search(Family f, const Vector3& q) {
  const bool real_first = f == Family::GW || f == Family::EPW;
  Vector3 v{};
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == 0 && real_first) {
      if (std::abs(q[j]) > 1e3) return std::nullopt;
      v[j] = q[j];
    } else {
      if (std::abs(q[j]) > kMaxLogCoordinate) return std::nullopt;
      v[j] = std::exp(q[j]);
    }
  }
  // GW with lambda >= 1 has an unbounded likelihood at the support edge.
  if (f == Family::GW && v[0] >= 1.0) return std::nullopt;
  return v;
}

/// Weibull (shape k, scale s) mapped onto each family's Weibull sub-model.
inline Vector3 weibull_embedding(Family f, double k, double s, double tilt) {
  switch (f) {
    case Family::GG: return {1.0, 1.0 / s, k};
    case Family::GW: return {0.0, s, 1.0 / k};
    case Family::EW: return {s, 1.0, k};
    case Family::MOW: return {std::pow(s, -k), 1.0, k};
    case Family::EPW: return {tilt, k, std::pow(s, -k)};
  }
  return {1.0, 1.0, 1.0};
}

/// Weibull moment matching on log data: Var(log T) = pi^2 / (6 k^2),
/// E(log T) = log s - euler_gamma / k.
inline std::pair<double, double> weibull_log_moments(const Sample& s) {
  const double n = static_cast<double>(s.size());
  const double m = s.sum_log() / n;
  double var = 0.0;
  for (double t : s.values()) var += (std::log(t) - m) * (std::log(t) - m);
  var /= std::max(1.0, n - 1.0);
  double k = var > 0.0 ? std::numbers::pi / std::sqrt(6.0 * var) : 1.0;
  k = std::clamp(k, 0.05, 50.0);
  return {k, std::exp(m + std::numbers::egamma / k)};
}

inline std::vector<Vector3> starting_points(Family f, const Sample& s, int n_starts,
                                            std::uint64_t seed) {
  std::vector<Vector3> starts;
  const auto [k, scale] = weibull_log_moments(s);
  starts.push_back(to_search(f, weibull_embedding(f, k, scale, 0.5)));
  if (n_starts > 1) starts.push_back(to_search(f, weibull_embedding(f, 1.0, s.mean(), -0.5)));
  SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(f));
  const Vector3 base = starts.front();
  while (static_cast<int>(starts.size()) < n_starts) {
    Vector3 q = base;
    for (auto& x : q) x += rng.normal();
    starts.push_back(q);
  }
  return starts;
}

}  // namespace detail

/// Maximum-likelihood fit. `warm_start`, when given, is tried first.
inline FitResult fit_mle(Family family, const Sample& sample, const OptimizerConfig& config = {},
                         const std::optional<Params>& warm_start = std::nullopt) {
  config.validate();
  if (sample.size() < 3) throw DegenerateSampleError("fit_mle: at least 3 observations required");
  if (sample.distinct_count() < 2) {
    throw DegenerateSampleError("fit_mle: sample has fewer than 2 distinct values");
  }

  auto objective = [&](const Vector3& q) {
    const auto v = detail::from_search(family, q);
    if (!v) return std::numeric_limits<double>::infinity();
    return -detail::loglik_or_neg_inf(make_params(family, *v), sample);
  };

  NelderMeadOptions nm;
  nm.max_iter = config.max_iter;
  nm.tol = config.tol;

  std::vector<Vector3> starts;
  if (warm_start) starts.push_back(detail::to_search(family, param_values(*warm_start)));
  for (const auto& q : detail::starting_points(family, sample, config.n_starts, config.seed)) {
    if (static_cast<int>(starts.size()) >= config.n_starts) break;
    starts.push_back(q);
  }

  FitResult out;
  out.family = family;
  out.n = sample.size();

  struct Candidate {
    Vector3 q;
    double value;
    bool converged;
  };
  std::optional<Candidate> best;
  const Vector3 anchor = detail::to_search(
      family, detail::weibull_embedding(family, detail::weibull_log_moments(sample).first,
                                        detail::weibull_log_moments(sample).second, 0.5));
  auto run = [&](Vector3 start) {
    // Pull infeasible starts toward the Weibull seed until the objective is finite.
    for (int k = 0; k < 30 && !std::isfinite(objective(start)); ++k) {
      for (std::size_t j = 0; j < 3; ++j) start[j] = 0.5 * (start[j] + anchor[j]);
    }
    if (!std::isfinite(objective(start))) return;
    const auto r = nelder_mead<3>(objective, start, nm);
    out.evaluations += r.evaluations;
    ++out.n_restarts_used;
    if (std::isfinite(r.fx) && (!best || r.fx < best->value)) best = Candidate{r.x, r.fx, r.converged};
  };
  for (const auto& s : starts) run(s);

  auto finalize = [&]() {
    const auto v = *detail::from_search(family, best->q);
    out.params = make_params(family, v);
    out.loglik = -best->value;
    out.at_search_boundary = detail::near_search_edge(family, best->q);
    const Vector3 g = score(out.params, sample);
    out.score_residual = 0.0;
    for (double x : g) out.score_residual = std::max(out.score_residual, std::abs(x));
    if (!std::isfinite(out.score_residual)) out.score_residual = std::numeric_limits<double>::infinity();
  };

  if (!best) {
    throw ConvergenceError(std::string("fit_mle: every start failed for ") +
                           std::string(family_name(family)));
  }
  finalize();

  // Escalate: restart around the incumbent while the score check fails.
  const auto score_ok = [&] { return out.score_residual <= 1e-4 * (1.0 + std::abs(out.loglik)); };
  SplitMix64 rng = SplitMix64::stream(config.seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(family));
  for (int extra = 0; extra < config.n_starts && !score_ok(); ++extra) {
    Vector3 q = best->q;
    if (extra > 0) {
      for (auto& x : q) x += 0.1 * rng.normal();
    }
    run(q);
    finalize();
  }

  std::string diag;
  bool info_ok = false;
  try {
    out.observed_info = observed_information(out.params, sample);
    Eigen::SelfAdjointEigenSolver<Matrix3> eig(out.observed_info);
    const auto ev = eig.eigenvalues();
    info_ok = ev.minCoeff() >= -1e-8 * std::max(1.0, std::abs(ev.maxCoeff()));
    if (!info_ok) diag += "observed information is not positive semidefinite; ";
  } catch (const std::exception& e) {
    diag += std::string("observed information unavailable: ") + e.what() + "; ";
  }
  if (!best->converged) diag += "simplex did not converge within max_iter; ";
  if (out.at_search_boundary) diag += "maximum lies on the search boundary (degenerate limit); ";
  if (!score_ok()) diag += "score residual above tolerance; ";

  out.optimizer_converged = best->converged;
  out.converged = best->converged && score_ok() && info_ok;
  if (info_ok) {
    try {
      out.std_errors = standard_errors(out.observed_info);
      out.wald_ci_95 = wald_intervals(param_values(out.params), out.std_errors, 0.95);
    } catch (const SingularMatrixError& e) {
      diag += std::string(e.what()) + "; ";
    }
  }
  if (diag.size() >= 2) diag.resize(diag.size() - 2);
  out.diagnostics = diag.empty() ? "ok" : diag;
  return out;
}

}  // namespace wfit
