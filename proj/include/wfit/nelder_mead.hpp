#pragma once

// Derivative-free downhill simplex (Nelder-Mead) minimizer with standard
// reflection / expansion / contraction / shrink coefficients (1, 2, 1/2, 1/2).
// Non-finite objective values are treated as +inf, so infeasible regions can be
// expressed by returning NaN or +inf.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace wfit {

struct NelderMeadOptions {
  int max_iter = 5000;         // per simplex run
  double tol = 1e-9;           // simplex diameter (max vertex distance to best, inf-norm)
  double ftol = 1e-12;         // relative spread of objective values
  double initial_step = 0.25;  // edge length of the starting simplex
  int max_reinits = 4;         // fresh simplices built around a converged point
};

template <std::size_t N>
struct NelderMeadResult {
  std::array<double, N> x{};
  double fx = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

template <std::size_t N>
double simplex_diameter(const std::array<std::array<double, N>, N + 1>& v, std::size_t best) {
  double d = 0.0;
  for (std::size_t j = 0; j <= N; ++j) {
    for (std::size_t i = 0; i < N; ++i) d = std::max(d, std::abs(v[j][i] - v[best][i]));
  }
  return d;
}

}  // namespace detail

template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead(F&& objective, const std::array<double, N>& start,
                                const NelderMeadOptions& opt = {}) {
  using Point = std::array<double, N>;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  NelderMeadResult<N> res;

  auto eval = [&](const Point& p) {
    ++res.evaluations;
    const double v = objective(p);
    return std::isfinite(v) ? v : kInf;
  };

  Point origin = start;
  double f_origin = eval(origin);

  for (int round = 0; round <= opt.max_reinits; ++round) {
    std::array<Point, N + 1> v{};
    std::array<double, N + 1> fv{};
    v[0] = origin;
    fv[0] = f_origin;
    for (std::size_t i = 0; i < N; ++i) {
      v[i + 1] = origin;
      v[i + 1][i] += opt.initial_step;
      fv[i + 1] = eval(v[i + 1]);
      if (!std::isfinite(fv[i + 1])) {
        // Try the other direction before giving up on this edge.
        v[i + 1][i] = origin[i] - opt.initial_step;
        fv[i + 1] = eval(v[i + 1]);
      }
    }

    std::array<std::size_t, N + 1> order{};
    bool run_converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      ++res.iterations;
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t best = order[0];
      const std::size_t worst = order[N];
      const std::size_t second = order[N - 1];

      const double spread = fv[worst] - fv[best];
      if (std::isfinite(fv[best]) && detail::simplex_diameter<N>(v, best) < opt.tol &&
          spread <= opt.ftol * (1.0 + std::abs(fv[best]))) {
        run_converged = true;
        break;
      }

      Point centroid{};
      for (std::size_t j = 0; j <= N; ++j) {
        if (j == worst) continue;
        for (std::size_t i = 0; i < N; ++i) centroid[i] += v[j][i] / static_cast<double>(N);
      }
      auto along = [&](double coef) {
        Point p;
        for (std::size_t i = 0; i < N; ++i) p[i] = centroid[i] + coef * (v[worst][i] - centroid[i]);
        return p;
      };

      const Point xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < fv[best]) {
        const Point xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          v[worst] = xe;
          fv[worst] = fe;
        } else {
          v[worst] = xr;
          fv[worst] = fr;
        }
        continue;
      }
      if (fr < fv[second]) {
        v[worst] = xr;
        fv[worst] = fr;
        continue;
      }
      // Contraction: outside if the reflected point beats the worst vertex.
      const bool outside = fr < fv[worst];
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[worst])) {
        v[worst] = xc;
        fv[worst] = fc;
        continue;
      }
      for (std::size_t j = 0; j <= N; ++j) {
        if (j == best) continue;
        for (std::size_t i = 0; i < N; ++i) v[j][i] = v[best][i] + 0.5 * (v[j][i] - v[best][i]);
        fv[j] = eval(v[j]);
      }
    }

    const auto best_it = std::min_element(fv.begin(), fv.end());
    const std::size_t best = static_cast<std::size_t>(best_it - fv.begin());
    const double improvement = f_origin - fv[best];
    origin = v[best];
    f_origin = fv[best];
    res.converged = run_converged;
    // A restart that cannot improve on the converged point confirms it.
    if (round > 0 && run_converged && improvement <= opt.ftol * (1.0 + std::abs(f_origin))) break;
    if (!run_converged) break;
  }

  res.x = origin;
  res.fx = f_origin;
  return res;
}

}  // namespace wfit
