#pragma once
#ifndef SDFRELAY_DIVERSITY_HPP
#define SDFRELAY_DIVERSITY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sdfrelay/analytic.hpp"
#include "sdfrelay/bounds.hpp"

namespace sdfrelay::diversity {

using geometry::NetworkConfig;

/// n log-spaced densities from hi down to lo (inclusive).
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo, "log_grid: need 0 < lo < hi");
  require(n >= 2, "log_grid: need at least 2 points");
  std::vector<double> g(n);
  const double a = std::log(hi), b = std::log(lo);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = hi;
  g.back() = lo;
  return g;
}

/// Least-squares line through (log λ, log q). delta_hat is the SC-DO estimate.
struct SlopeFit {
  double delta_hat = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log q
  std::vector<double> lambda_grid;
  std::vector<double> q_values;
  Method source = Method::analytic;
};

/// Plain OLS fit on at least two positive points, no grid-span requirement.
inline SlopeFit fit_log_log(const std::vector<double>& lambdas, const std::vector<double>& qs,
                            Method source = Method::analytic) {
  require(lambdas.size() == qs.size(), "fit_log_log: size mismatch");
  require(lambdas.size() >= 2, "fit_log_log: need at least 2 points");
  const std::size_t n = lambdas.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require(lambdas[i] > 0.0, "fit_log_log: lambda must be positive");
    if (!(qs[i] > 0.0))
      throw DomainError("outage probability is 0 at lambda = " + std::to_string(lambdas[i]) +
                        "; use larger densities or an analytic source");
    mx += std::log(lambdas[i]);
    my += std::log(qs[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(lambdas[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(qs[i]) - my);
  }
  require(sxx > 0.0, "fit_log_log: densities must not all coincide");
  SlopeFit fit;
  fit.delta_hat = sxy / sxx;
  fit.intercept = my - fit.delta_hat * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::log(qs[i]) - (fit.intercept + fit.delta_hat * std::log(lambdas[i]));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  fit.lambda_grid = lambdas;
  fit.q_values = qs;
  fit.source = source;
  return fit;
}

/// Checks the SC-DO grid contract: at least 5 distinct positive points spanning
/// two decades. Returns the grid sorted in decreasing order.
inline std::vector<double> validated_grid(std::vector<double> grid) {
  require(grid.size() >= 5, "SC-DO grid needs at least 5 points");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  require(grid.back() > 0.0, "SC-DO grid densities must be positive");
  require(std::adjacent_find(grid.begin(), grid.end()) == grid.end(), "SC-DO grid has duplicate points");
  require(std::log10(grid.front() / grid.back()) >= 2.0 - 1e-9, "SC-DO grid must span at least two decades");
  return grid;
}

/// Slope of log q against log λ over a validated grid.
inline SlopeFit estimate_scdo(const std::function<double(double)>& q_of_lambda, std::vector<double> lambda_grid,
                              Method source = Method::analytic) {
  const auto grid = validated_grid(std::move(lambda_grid));
  std::vector<double> qs;
  qs.reserve(grid.size());
  for (double l : grid) qs.push_back(q_of_lambda(l));
  return fit_log_log(grid, qs, source);
}

inline std::vector<double> default_analytic_grid() { return log_grid(1e-6, 1e-4, 8); }
inline std::vector<double> default_montecarlo_grid() { return log_grid(1e-4, 1e-2, 8); }

/// w(t) = sum_k a_k (1 - exp(-t z_k)); w(t) ~ t as t -> 0 iff sum_k a_k z_k != 0.
struct ExponentialMixture {
  std::vector<double> a;
  std::vector<double> z;

  double operator()(double t) const {
    double w = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) w -= a[k] * std::expm1(-t * z[k]);
    return w;
  }
  double linear_coefficient() const {
    double c = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) c += a[k] * z[k];
    return c;
  }
};

/// One configuration per theorem case.
struct ConfigFamily {
  NetworkConfig rayleigh;        // all links Rayleigh
  NetworkConfig fading_marks;    // u = 1, Rayleigh interference marks
  NetworkConfig overlap;         // path loss only, dominant balls overlap
  NetworkConfig disjoint;        // path loss only, dominant balls disjoint

  static ConfigFamily standard() {
    const geometry::PathLossParams pl(4.0);
    const geometry::NodeLayout near({15.0, 0.0}, {6.0, 0.0});
    const geometry::NodeLayout far({15.0, 0.0}, {30.0, 0.0});
    return {{near, pl, 0.1, 0.0}, {near, pl, 0.1, 0.0}, {near, pl, 0.1, 0.0}, {far, pl, 0.1, 0.0}};
  }
};

struct TheoremCheck {
  std::string name;
  double expected = 0.0;
  double tolerance = 0.0;
  SlopeFit fit;
  bool pass = false;
};

struct TheoremReport {
  std::vector<TheoremCheck> checks;
  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.pass; });
  }
};

/// Fits the SC-DO of each theorem case from the closed-form or bound expressions.
inline TheoremReport verify_theorem_table(const ConfigFamily& family,
                                          const quadrature::QuadratureSettings& settings = {},
                                          double tolerance = 0.15) {
  TheoremReport report;
  const auto grid = default_analytic_grid();
  const auto add = [&](std::string name, double expected, SlopeFit fit) {
    TheoremCheck c{std::move(name), expected, tolerance, std::move(fit), false};
    c.pass = std::abs(c.fit.delta_hat - expected) <= tolerance;
    report.checks.push_back(std::move(c));
  };

  const auto ray = analytic::outage_integrals(family.rayleigh, settings);
  add("rayleigh", 1.0, estimate_scdo([&](double l) { return ray.at(l).q; }, grid, Method::analytic));

  const double rate = bounds::jointly_dominant_rate(family.fading_marks,
                                                    bounds::DominantSetSpec<>::for_beta(family.fading_marks.beta),
                                                    settings);
  add("fading-marks", 1.0, estimate_scdo([&](double l) { return -std::expm1(-l * rate); }, grid, Method::bound));

  for (const auto* cfg : {&family.overlap, &family.disjoint}) {
    const auto asym = bounds::q_bc_asymptotic_pathloss_only(*cfg);
    const auto regions = asym.regions;
    add(cfg == &family.overlap ? "pathloss-overlap" : "pathloss-disjoint", static_cast<double>(asym.order),
        estimate_scdo([&](double l) { return bounds::q_bc_dominant_pathloss_only(regions, l); }, grid,
                      Method::bound));
  }
  return report;
}

}  // namespace sdfrelay::diversity

#endif  // SDFRELAY_DIVERSITY_HPP
