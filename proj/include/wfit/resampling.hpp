#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/rng.hpp"
#include "wfit/sample.hpp"

namespace wfit {

struct BootstrapConfig {
  int replicates = 1000;
  std::uint64_t seed = 0;
  double level = 0.95;
  double u = 0.25;
  int refit_starts = 2;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (replicates < 100) throw ParameterError("bootstrap: replicates must be >= 100");
    if (!(level > 0.0 && level < 1.0)) throw ParameterError("bootstrap: level must lie in (0, 1)");
    if (!(u > 0.0 && u < 1.0)) throw ParameterError("bootstrap: u must lie in (0, 1)");
    if (refit_starts < 1) throw ParameterError("bootstrap: refit_starts must be >= 1");
  }
};

struct BootstrapStatistic {
  std::string name;
  double point = 0.0;
  Interval interval;
  double sd = 0.0;
};

struct BootstrapResult {
  Family family = Family::GG;
  int replicates = 0;
  int effective = 0;
  int failed = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
  double u = 0.25;
  std::vector<BootstrapStatistic> statistics;  // parameters in family order, then y_star
  std::vector<std::vector<double>> draws;      // per statistic, successful replicates in index order

  const BootstrapStatistic& get(const std::string& name) const {
    for (const auto& s : statistics) {
      if (s.name == name) return s;
    }
    throw std::out_of_range("bootstrap: no statistic named " + name);
  }
  const BootstrapStatistic& y_star() const { return get("y_star"); }
};

/// n indices drawn uniformly with replacement from [0, n).
inline std::vector<std::size_t> resample_indices(std::size_t n, SplitMix64& rng) {
  if (n < 1) throw DomainError("resample_indices: n must be >= 1");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

/// Linear-interpolation sample quantile of sorted data at probability p.
inline double empirical_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DomainError("empirical_quantile: no data");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace detail {

inline BootstrapStatistic summarize(std::string name, double point, std::vector<double> values,
                                    double level) {
  std::sort(values.begin(), values.end());
  BootstrapStatistic s;
  s.name = std::move(name);
  s.point = point;
  s.interval.lower = empirical_quantile(values, 0.5 * (1.0 - level));
  s.interval.upper = empirical_quantile(values, 0.5 * (1.0 + level));
  if (!(s.interval.lower < s.interval.upper)) {
    throw ConvergenceError("bootstrap: degenerate percentile interval for " + s.name);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

}  // namespace detail

/// Nonparametric percentile bootstrap of the parameters and of the u-quantile.
/// Replicate r draws its resample from SplitMix64::stream(seed, r) and refits with the
/// base MLE as warm start, so results do not depend on thread scheduling. A refit counts
/// when the simplex converges; resamples whose likelihood supremum sits in a degenerate
/// limit still yield a usable fitted distribution. Refits that throw or whose simplex
/// does not converge are dropped and counted.
inline BootstrapResult bootstrap_fit(Family family, const Sample& sample, const BootstrapConfig& config,
                                     const std::optional<FitResult>& base_fit = std::nullopt) {
  config.validate();
  const FitResult base = base_fit ? *base_fit : fit_mle(family, sample);
  if (base.family != family) throw ParameterError("bootstrap: base fit is for a different family");
  if (!base.converged) throw ConvergenceError("bootstrap: base fit did not converge");

  const auto B = static_cast<std::size_t>(config.replicates);
  std::vector<std::optional<std::array<double, 4>>> out(B);

  auto run_one = [&](std::size_t r) {
    auto rng = SplitMix64::stream(config.seed, r);
    try {
      const Sample resample = sample.subset(resample_indices(sample.size(), rng));
      OptimizerConfig oc;
      oc.n_starts = config.refit_starts;
      oc.seed = rng();
      const FitResult fit = fit_mle(family, resample, oc, base.params);
      if (!fit.optimizer_converged) return;
      const auto v = param_values(fit.params);
      const double y = quantile(fit.params, config.u);
      if (!std::isfinite(y)) return;
      out[r] = std::array<double, 4>{v[0], v[1], v[2], y};
    } catch (const std::exception&) {
    }
  };

  unsigned nthreads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, B));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < B; r = next++) run_one(r);
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  BootstrapResult res;
  res.family = family;
  res.replicates = config.replicates;
  res.seed = config.seed;
  res.level = config.level;
  res.u = config.u;
  res.draws.assign(4, {});
  for (const auto& o : out) {
    if (!o) continue;
    for (std::size_t j = 0; j < 4; ++j) res.draws[j].push_back((*o)[j]);
  }
  res.effective = static_cast<int>(res.draws[0].size());
  res.failed = res.replicates - res.effective;
  if (res.effective < 0.8 * res.replicates) {
    throw ConvergenceError("bootstrap: only " + std::to_string(res.effective) + " of " +
                           std::to_string(res.replicates) + " refits converged");
  }

  const auto names = param_names(family);
  const auto point = param_values(base.params);
  for (std::size_t j = 0; j < 3; ++j) {
    res.statistics.push_back(detail::summarize(std::string(names[j]), point[j], res.draws[j], config.level));
  }
  res.statistics.push_back(
      detail::summarize("y_star", quantile(base.params, config.u), res.draws[3], config.level));
  return res;
}

}  // namespace wfit
