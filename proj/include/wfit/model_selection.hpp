#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <vector>

#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/sample.hpp"

namespace wfit {

// ---------------------------------------------------------------------------
// Total time on test

struct TttPoint {
  double r_over_n;
  double g;
};

struct TttCurve {
  std::vector<TttPoint> points;
};

/// Scaled TTT transform on the order statistics:
///   G(r/n) = (sum_{i<=r} t_(i) + (n - r) t_(r)) / sum_i t_i,  r = 1..n.
/// The last ordinate is exactly 1.
inline TttCurve ttt_transform(const Sample& s) {
  const auto t = s.sorted();
  const std::size_t n = t.size();
  if (n == 0) throw DegenerateSampleError("ttt_transform: empty sample");
  double total = 0.0;
  for (double v : t) total += v;
  if (!(total > 0.0)) throw DegenerateSampleError("ttt_transform: total time is zero");

  TttCurve curve;
  curve.points.reserve(n);
  double partial = 0.0;
  for (std::size_t r = 1; r <= n; ++r) {
    partial += t[r - 1];
    const double numer = partial + static_cast<double>(n - r) * t[r - 1];
    curve.points.push_back({static_cast<double>(r) / static_cast<double>(n), numer / total});
  }
  curve.points.back().g = 1.0;
  return curve;
}

enum class HazardShape { Constant, Increasing, Decreasing, Bathtub, InverseBathtub };

inline std::string_view hazard_shape_label(HazardShape s) {
  switch (s) {
    case HazardShape::Constant: return "approximately constant";
    case HazardShape::Increasing: return "concave";
    case HazardShape::Decreasing: return "convex";
    case HazardShape::Bathtub: return "bathtub";
    case HazardShape::InverseBathtub: return "inverse bathtub";
  }
  return "?";
}

inline std::string_view hazard_shape_meaning(HazardShape s) {
  switch (s) {
    case HazardShape::Constant: return "constant hazard";
    case HazardShape::Increasing: return "increasing hazard";
    case HazardShape::Decreasing: return "decreasing hazard";
    case HazardShape::Bathtub: return "bathtub-shaped hazard";
    case HazardShape::InverseBathtub: return "unimodal (upside-down bathtub) hazard";
  }
  return "?";
}

/// Reads the hazard shape off the sign pattern of G(r/n) - r/n. Deviations inside
/// +/- band count as zero; the default band 1.36 / sqrt(n) is the 5% Kolmogorov
/// critical distance. Curve above the diagonal is concave (increasing hazard),
/// below is convex (decreasing); below-then-above is bathtub and above-then-below
/// is inverse bathtub. When the pattern has more than two runs, the first and last
/// runs decide.
inline HazardShape diagnose_hazard_shape(const TttCurve& curve, double band = -1.0) {
  const auto n = static_cast<double>(curve.points.size());
  if (band < 0.0) band = 1.36 / std::sqrt(n);
  std::vector<int> runs;
  for (const auto& p : curve.points) {
    const double d = p.g - p.r_over_n;
    const int sign = d > band ? 1 : (d < -band ? -1 : 0);
    if (sign != 0 && (runs.empty() || runs.back() != sign)) runs.push_back(sign);
  }
  if (runs.empty()) return HazardShape::Constant;
  const int first = runs.front();
  const int last = runs.back();
  if (first == last) return first > 0 ? HazardShape::Increasing : HazardShape::Decreasing;
  return first < 0 ? HazardShape::Bathtub : HazardShape::InverseBathtub;
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// D_n = sup |F_n(t) - F(t)| against an arbitrary continuous CDF. Ties are handled by
/// evaluating at distinct values with cumulative counts.
template <class Cdf>
  requires std::is_invocable_r_v<double, Cdf, double>
double ks_statistic(const Sample& s, Cdf&& model_cdf) {
  const auto t = s.sorted();
  const double n = static_cast<double>(t.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t j = i;
    while (j < t.size() && t[j] == t[i]) ++j;
    const double f = model_cdf(t[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(j) / n;
    d = std::max({d, std::abs(above - f), std::abs(f - below)});
    i = j;
  }
  return std::min(d, 1.0);
}

inline double ks_statistic(const Sample& s, const Params& p) {
  return ks_statistic(s, [&](double x) { return cdf(p, x); });
}

/// Asymptotic Kolmogorov tail probability at (sqrt(n) + 0.12 + 0.11 / sqrt(n)) d.
/// The alternating series is used for large arguments and the Jacobi theta form
/// for small ones; both are truncated once terms drop below 1e-10.
inline double ks_pvalue(double d, std::size_t n) {
  if (!(d >= 0.0 && d <= 1.0)) throw DomainError("ks_pvalue: d must lie in [0, 1]");
  if (n < 1) throw DomainError("ks_pvalue: n must be >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double x = (rn + 0.12 + 0.11 / rn) * d;
  if (x <= 0.0) return 1.0;
  double q;
  if (x < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf_sum = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double k = 2.0 * j - 1.0;
      const double term = std::exp(-k * k * pi2 / (8.0 * x * x));
      cdf_sum += term;
      if (term < 1e-10 * std::max(cdf_sum, 1e-300)) break;
    }
    q = 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * cdf_sum;
  } else {
    q = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double term = std::exp(-2.0 * j * j * x * x);
      q += (j % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-10) break;
    }
  }
  return std::clamp(q, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Information criteria

inline double aic(double loglik, int k) {
  if (k < 1) throw DomainError("aic: k must be >= 1");
  return -2.0 * loglik + 2.0 * k;
}

/// AIC + 2k(k+1)/(n-k-1); requires n > k + 1.
inline double aicc(double aic_value, int k, std::size_t n) {
  if (k < 1) throw DomainError("aicc: k must be >= 1");
  if (static_cast<double>(n) <= k + 1.0) throw DomainError("aicc: requires n > k + 1");
  return aic_value + 2.0 * k * (k + 1.0) / (static_cast<double>(n) - k - 1.0);
}

inline constexpr int kParamsPerFamily = 3;
inline constexpr double kKsAlpha = 0.05;

struct GofResult {
  Family family = Family::GG;
  double loglik = 0.0;
  double ks_stat = 0.0;
  double ks_pvalue = 1.0;
  double aic = 0.0;
  double aicc = 0.0;
  int k = kParamsPerFamily;
  std::size_t n = 0;
  double score_residual = 0.0;
  bool converged = false;

  bool admissible() const { return ks_pvalue >= kKsAlpha; }
};

inline GofResult goodness_of_fit(const FitResult& fit, const Sample& s) {
  GofResult g;
  g.family = fit.family;
  g.loglik = fit.loglik;
  g.n = s.size();
  g.k = kParamsPerFamily;
  g.ks_stat = ks_statistic(s, fit.params);
  g.ks_pvalue = ks_pvalue(g.ks_stat, s.size());
  g.aic = aic(fit.loglik, g.k);
  g.aicc = aicc(g.aic, g.k, s.size());
  g.score_residual = fit.score_residual;
  g.converged = fit.converged;
  return g;
}

struct SelectionReport {
  std::vector<GofResult> results;  // ranked: AICc, then AIC, then score residual
  Family best = Family::GG;

  const GofResult& at(Family f) const {
    for (const auto& r : results) {
      if (r.family == f) return r;
    }
    throw std::out_of_range("SelectionReport: family not present");
  }
  const GofResult& winner() const { return at(best); }
};

/// Ranks candidates and picks the admissible one with minimum AICc (ties: AIC, then the
/// smaller score residual, then family order). Families with KS p-value < 0.05 are never
/// chosen. Throws NoAdmissibleModelError if every candidate is rejected.
inline SelectionReport select_best(std::vector<GofResult> candidates) {
  if (candidates.empty()) throw NoAdmissibleModelError("select_best: no candidates");
  std::sort(candidates.begin(), candidates.end(), [](const GofResult& a, const GofResult& b) {
    return std::tuple(a.aicc, a.aic, a.score_residual, static_cast<int>(a.family)) <
           std::tuple(b.aicc, b.aic, b.score_residual, static_cast<int>(b.family));
  });
  SelectionReport rep;
  rep.results = std::move(candidates);
  const auto it = std::find_if(rep.results.begin(), rep.results.end(),
                               [](const GofResult& g) { return g.admissible(); });
  if (it == rep.results.end()) {
    throw NoAdmissibleModelError("no candidate passes the KS test at the 5% level");
  }
  rep.best = it->family;
  return rep;
}

}  // namespace wfit
