#pragma once
#ifndef SDFRELAY_OPTIMIZER_HPP
#define SDFRELAY_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sdfrelay/analytic.hpp"

namespace sdfrelay::optimizer {

struct OptimizerSettings {
  quadrature::QuadratureSettings quadrature{};
  std::size_t grid_points = 41;
  double ratio_lo = 0.025;
  double ratio_hi = 0.975;
  double resolution = 0.005;
  /// Below this density the objective is the linear small-λ coefficient.
  double small_lambda = 1e-6;
  unsigned threads = 0;
};

struct TracePoint {
  double ratio = 0.0;
  double objective = 0.0;
};

/// Relay placement on the source-destination segment; ratio = |x_s - x_r| / |x_s|.
struct PlacementResult {
  double optimal_ratio = 0.0;
  double optimal_q = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  bool linear_objective = false;  // minimized c_bc + c_mac instead of q
  bool flat_objective = false;    // objective varied by < 1e-12 over the grid
  std::vector<TracePoint> trace;
};

namespace detail {

/// Evaluates f on every input across worker threads; output order matches input.
template <class F>
std::vector<double> parallel_map(const std::vector<double>& xs, unsigned threads, F&& f) {
  std::vector<double> out(xs.size());
  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = static_cast<unsigned>(std::min<std::size_t>(n, xs.size()));
  if (n <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < xs.size(); i += n) out[i] = f(xs[i]);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace detail

inline geometry::NetworkConfig line_config(double source_distance, double ratio, double alpha, double beta,
                                           double lambda) {
  return {geometry::NodeLayout({source_distance, 0.0}, {(1.0 - ratio) * source_distance, 0.0}),
          geometry::PathLossParams(alpha), beta, lambda};
}

/// Minimizes total Rayleigh-fading outage over relay positions on the line
/// between source and destination: a coarse ratio grid, then golden-section
/// refinement inside the bracket around the best grid point.
inline PlacementResult optimize_relay_line(double source_distance, double alpha, double beta, double lambda,
                                           const OptimizerSettings& settings = {}) {
  require(source_distance > 0.0, "source distance must be positive");
  require(alpha > 2.0, "alpha must exceed 2");
  require(beta > 0.0, "beta must be positive");
  require(lambda > 0.0, "lambda must be positive");
  require(settings.grid_points >= 3, "optimizer grid needs at least 3 points");
  require(0.0 < settings.ratio_lo && settings.ratio_lo < settings.ratio_hi && settings.ratio_hi < 1.0,
          "ratio search interval must lie inside (0, 1)");

  PlacementResult res;
  res.alpha = alpha;
  res.beta = beta;
  res.lambda = lambda;
  res.linear_objective = lambda < settings.small_lambda;

  const auto objective = [&](double ratio) {
    const auto cfg = line_config(source_distance, ratio, alpha, beta, lambda);
    if (res.linear_objective) return analytic::small_lambda_coefficients(cfg, settings.quadrature).total();
    return analytic::outage_rayleigh(cfg, settings.quadrature).q;
  };

  const std::size_t n = settings.grid_points;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = settings.ratio_lo +
              (settings.ratio_hi - settings.ratio_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  const std::vector<double> values = detail::parallel_map(grid, settings.threads, objective);
  for (std::size_t i = 0; i < n; ++i) res.trace.push_back({grid[i], values[i]});

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  res.flat_objective = *hi_it - *lo_it < 1e-12;
  const std::size_t best = static_cast<std::size_t>(lo_it - values.begin());

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, n - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  res.trace.push_back({c, fc});
  res.trace.push_back({d, fd});
  while (b - a > 0.2 * settings.resolution) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
      res.trace.push_back({c, fc});
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
      res.trace.push_back({d, fd});
    }
  }

  const auto best_point = std::min_element(res.trace.begin(), res.trace.end(),
                                           [](const TracePoint& x, const TracePoint& y) { return x.objective < y.objective; });
  res.optimal_ratio = best_point->ratio;
  res.optimal_q = res.linear_objective
                      ? analytic::outage_rayleigh(line_config(source_distance, res.optimal_ratio, alpha, beta, lambda),
                                                  settings.quadrature)
                            .q
                      : best_point->objective;
  return res;
}

struct CurvePoint {
  double alpha = 0.0;
  std::optional<PlacementResult> result;
  std::string error;  // set when the placement failed for this alpha
};

/// Optimal relay ratio for each path-loss exponent; failures are recorded per point.
inline std::vector<CurvePoint> sweep_alpha_curve(const std::vector<double>& alpha_grid, double beta, double lambda,
                                                 double source_distance, const OptimizerSettings& settings = {}) {
  for (double a : alpha_grid) require(a > 2.0, "alpha grid values must exceed 2");
  std::vector<CurvePoint> curve;
  for (double a : alpha_grid) {
    CurvePoint p;
    p.alpha = a;
    try {
      p.result = optimize_relay_line(source_distance, a, beta, lambda, settings);
    } catch (const QuadratureError& e) {
      p.error = e.what();
    }
    curve.push_back(std::move(p));
  }
  return curve;
}

}  // namespace sdfrelay::optimizer

#endif  // SDFRELAY_OPTIMIZER_HPP
