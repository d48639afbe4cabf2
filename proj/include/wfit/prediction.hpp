#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "wfit/distributions.hpp"
#include "wfit/errors.hpp"
#include "wfit/estimation.hpp"
#include "wfit/resampling.hpp"

namespace wfit {

struct MaintenancePlan {
  Family family = Family::GG;
  Params params;
  double u = 0.25;
  double y_star = 0.0;
  Interval ci;  // bootstrap percentile interval for y_star; NaN when no bootstrap was run
  double level = 0.95;
  int replicates = 0;
  int effective_replicates = 0;
  std::uint64_t seed = 0;

  /// Nearest whole day, never below 1.
  long rounded_days() const { return std::max(1L, std::lround(y_star)); }

  std::string recommendation() const {
    char buf[160];
    if (std::isnan(ci.lower)) {
      std::snprintf(buf, sizeof buf, "preventive maintenance in ~%ld days after the last failure",
                    rounded_days());
    } else {
      std::snprintf(buf, sizeof buf,
                    "preventive maintenance in ~%ld days after the last failure, %g%% CI [%.3f, %.3f]",
                    rounded_days(), 100.0 * level, ci.lower, ci.upper);
    }
    return buf;
  }
};

/// Plan without an interval: y* = quantile(params, u).
inline MaintenancePlan predict_maintenance(const FitResult& fit, double u) {
  if (!(u > 0.0 && u < 1.0)) throw ParameterError("predict_maintenance: u must lie in (0, 1)");
  MaintenancePlan plan;
  plan.family = fit.family;
  plan.params = fit.params;
  plan.u = u;
  plan.y_star = quantile(fit.params, u);
  return plan;
}

inline MaintenancePlan predict_maintenance(const FitResult& fit, double u, const BootstrapResult& boot) {
  if (boot.family != fit.family) throw ParameterError("predict_maintenance: bootstrap family mismatch");
  if (boot.u != u) throw ParameterError("predict_maintenance: bootstrap was run at a different u");
  MaintenancePlan plan = predict_maintenance(fit, u);
  plan.ci = boot.y_star().interval;
  plan.level = boot.level;
  plan.replicates = boot.replicates;
  plan.effective_replicates = boot.effective;
  plan.seed = boot.seed;
  return plan;
}

}  // namespace wfit
