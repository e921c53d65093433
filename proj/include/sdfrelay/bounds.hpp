#pragma once
#ifndef SDFRELAY_BOUNDS_HPP
#define SDFRELAY_BOUNDS_HPP

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sdfrelay/analytic.hpp"
#include "sdfrelay/geometry.hpp"
#include "sdfrelay/montecarlo.hpp"

namespace sdfrelay::bounds {

using geometry::NetworkConfig;
using quadrature::QuadratureSettings;

/// P(mark > x) for a unit-mean exponential mark.
struct RayleighTail {
  double operator()(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x); }
};

/// Dominance thresholds: an interferer is dominant at the relay when
/// g l(|x - x_r|) / l(|x_s - x_r|) > threshold_r, and at the destination when
/// h l(|x|) / l(|x_s|) > threshold_d.
template <class GTail = RayleighTail, class HTail = RayleighTail>
struct DominantSetSpec {
  double threshold_r;
  double threshold_d;
  GTail tail_g{};
  HTail tail_h{};

  static DominantSetSpec for_beta(double beta) {
    require(beta > 0.0, "beta must be positive");
    return {1.0 / beta, 2.0 / beta};
  }
};

/// Mean number of jointly dominant interferers per unit density, as the polar
/// integral ∫∫ 2r P(h > threshold_d / l*_sd(r)) P(g > threshold_r / l*_sr(r,phi)).
template <class GTail, class HTail>
double jointly_dominant_rate(const NetworkConfig& cfg, const DominantSetSpec<GTail, HTail>& spec,
                             const QuadratureSettings& settings = {}) {
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  return quadrature::integrate_polar(
      [&](double r, double phi) {
        return spec.tail_h(spec.threshold_d / k.sd(r)) * spec.tail_g(spec.threshold_r / k.sr(r, phi));
      },
      analytic::kernel_features(cfg), settings);
}

/// Same rate evaluated in Cartesian coordinates over the whole plane, using
/// the actual (unrotated) relay position.
template <class GTail, class HTail>
double jointly_dominant_rate_cartesian(const NetworkConfig& cfg, const DominantSetSpec<GTail, HTail>& spec,
                                       const QuadratureSettings& settings = {}) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const auto& l = cfg.layout;
  const double a = cfg.alpha();
  const double l_sr = geometry::path_loss(l.source_relay_distance(), a);
  const double l_s = geometry::path_loss(l.source_distance(), a);
  const Point2 xr = l.relay();
  const double inf = std::numeric_limits<double>::infinity();
  const auto inner = [&](double x) {
    const auto f = [&](double y) {
      const Point2 p{x, y};
      const double lr = 1.0 / (1.0 + std::pow((p - xr).norm2(), 0.5 * a));
      const double ld = 1.0 / (1.0 + std::pow(p.norm2(), 0.5 * a));
      return spec.tail_g(spec.threshold_r * l_sr / lr) * spec.tail_h(spec.threshold_d * l_s / ld);
    };
    return Rule::integrate(f, -inf, inf, settings.max_depth, 0.1 * settings.rel_tol);
  };
  double err = 0.0;
  const double v = Rule::integrate(inner, -inf, inf, settings.max_depth, settings.rel_tol, &err);
  if (!std::isfinite(v) || err > 10.0 * std::max(settings.rel_tol * std::abs(v), settings.abs_tol))
    throw QuadratureError("cartesian dominant-set integral did not converge", err);
  return v;
}

/// Lower bound on q_BC for non-fading desired links and fading interference:
/// q_BC >= P(some interferer is dominant at both relay and destination).
template <class GTail, class HTail>
double q_bc_lower_bound_fading_marks(const NetworkConfig& cfg, const DominantSetSpec<GTail, HTail>& spec,
                                     const QuadratureSettings& settings = {}) {
  if (cfg.lambda == 0.0) return 0.0;
  return -std::expm1(-cfg.lambda * jointly_dominant_rate(cfg, spec, settings));
}

/// Rayleigh marks with thresholds 1/beta and 2/beta.
inline double q_bc_lower_bound_fading_marks(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  return q_bc_lower_bound_fading_marks(cfg, DominantSetSpec<>::for_beta(cfg.beta), settings);
}

/// Small-λ behavior of q_BC without any fading: order 1 with coefficient
/// |A_r,d| when the dominant balls overlap, order 2 with |A_r| |A_d| otherwise.
struct PathlossAsymptotic {
  int order = 2;
  double coefficient = 0.0;
  /// A dominant ball is empty, so no single interferer can cause the outage.
  bool degenerate = false;
  geometry::DominantRegions regions;
};

inline PathlossAsymptotic q_bc_asymptotic_pathloss_only(const NetworkConfig& cfg) {
  PathlossAsymptotic out;
  out.regions = geometry::dominant_regions(cfg.layout, cfg.path_loss, cfg.beta);
  const auto& g = out.regions;
  if (g.relay_region_empty() || g.destination_region_empty()) {
    out.degenerate = true;
    return out;
  }
  if (g.overlap) {
    out.order = 1;
    out.coefficient = g.area_lens;
  } else {
    out.order = 2;
    out.coefficient = g.area_r * g.area_d;
  }
  return out;
}

/// P(a dominant interferer exists at both relay and destination) without
/// fading: the lens is hit, or both crescents are hit. A lower bound on q_BC
/// at every density, asymptotically exact.
inline double q_bc_dominant_pathloss_only(const geometry::DominantRegions& g, double lambda) {
  require(lambda >= 0.0, "lambda must be non-negative");
  const double lens = -std::expm1(-lambda * g.area_lens);
  const double only_r = -std::expm1(-lambda * (g.area_r - g.area_lens));
  const double only_d = -std::expm1(-lambda * (g.area_d - g.area_lens));
  return lens + std::exp(-lambda * g.area_lens) * only_r * only_d;
}

inline double q_bc_dominant_pathloss_only(const NetworkConfig& cfg) {
  return q_bc_dominant_pathloss_only(geometry::dominant_regions(cfg.layout, cfg.path_loss, cfg.beta), cfg.lambda);
}

/// P(r_n^{-alpha}(1 + r_n^alpha) > 1 + eps) for the n-th nearest interferer
/// distance r_n, i.e. P(n points in b(0, eps^{-1/alpha})) = 1 - Q(n, λ pi eps^{-2/alpha}).
inline double nearest_interferer_equivalence(unsigned n, double lambda, double epsilon, double alpha) {
  require(n >= 1, "n must be at least 1");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(epsilon > 0.0, "epsilon must be positive");
  require(alpha > 2.0, "alpha must exceed 2");
  if (lambda == 0.0) return 0.0;
  const double z = lambda * std::numbers::pi * std::pow(epsilon, -2.0 / alpha);
  return boost::math::gamma_p(static_cast<double>(n), z);
}

struct TightnessRow {
  double lambda = 0.0;
  double bound = 0.0;
  montecarlo::McEstimate mc;
  double ratio = 0.0;  // mc / bound
};

/// Simulated q_BC against the dominant-interferer bound, path loss only. All
/// grid points reuse sim.seed so the ratio curve shares random numbers.
inline std::vector<TightnessRow> tightness_diagnostic(const NetworkConfig& cfg, const std::vector<double>& lambda_grid,
                                                      const montecarlo::SimulationParams& sim) {
  const auto regions = geometry::dominant_regions(cfg.layout, cfg.path_loss, cfg.beta);
  require(!regions.relay_region_empty() && !regions.destination_region_empty(),
          "tightness_diagnostic: a dominant region is empty, the bound vanishes");
  for (double lambda : lambda_grid)
    require(lambda > 0.0, "tightness_diagnostic: lambda must be positive (ratio undefined at 0)");
  std::vector<TightnessRow> rows;
  for (double lambda : lambda_grid) {
    const auto c = cfg.with_lambda(lambda);
    TightnessRow row;
    row.lambda = lambda;
    row.bound = q_bc_dominant_pathloss_only(regions, lambda);
    row.mc = montecarlo::estimate_outage(c, FadingSpec::pathloss_only(), sim).bc;
    row.ratio = row.mc.p_hat / row.bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sdfrelay::bounds

#endif  // SDFRELAY_BOUNDS_HPP
