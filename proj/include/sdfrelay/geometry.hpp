#pragma once
#ifndef SDFRELAY_GEOMETRY_HPP
#define SDFRELAY_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdfrelay/types.hpp"

namespace sdfrelay::geometry {

/// Source, relay and destination positions. The destination sits at the origin.
class NodeLayout {
 public:
  NodeLayout(Point2 source, Point2 relay) : source_(source), relay_(relay) {
    require(std::isfinite(source.x) && std::isfinite(source.y) && std::isfinite(relay.x) &&
                std::isfinite(relay.y),
            "node coordinates must be finite");
    require(source.norm2() > 0.0, "source must not coincide with the destination");
    require(!(source == relay), "source must not coincide with the relay");
  }

  Point2 source() const noexcept { return source_; }
  Point2 relay() const noexcept { return relay_; }
  static constexpr Point2 destination() noexcept { return {0.0, 0.0}; }

  double source_distance() const noexcept { return source_.norm(); }
  double relay_distance() const noexcept { return relay_.norm(); }
  double source_relay_distance() const noexcept { return distance(source_, relay_); }

  NodeLayout rotated(double angle) const { return {source_.rotated(angle), relay_.rotated(angle)}; }

 private:
  Point2 source_;
  Point2 relay_;
};

struct PathLossParams {
  double alpha = 4.0;

  explicit PathLossParams(double a = 4.0) : alpha(a) {
    require(std::isfinite(a) && a > 2.0, "path-loss exponent must satisfy alpha > 2");
  }
};

/// Everything that fixes one snapshot model except fading.
struct NetworkConfig {
  NodeLayout layout;
  PathLossParams path_loss;
  double beta = 0.1;
  double lambda = 0.0;

  NetworkConfig(NodeLayout l, PathLossParams p, double b, double lam)
      : layout(l), path_loss(p), beta(b), lambda(lam) {
    require(std::isfinite(b) && b > 0.0, "SIR threshold beta must be positive");
    require(std::isfinite(lam) && lam >= 0.0, "interferer density lambda must be non-negative");
  }

  double alpha() const noexcept { return path_loss.alpha; }
  NetworkConfig with_lambda(double lam) const { return {layout, path_loss, beta, lam}; }
  NetworkConfig with_beta(double b) const { return {layout, path_loss, b, lambda}; }
};

/// ℓ(r) = 1 / (1 + r^alpha).
inline double path_loss(double r, double alpha) {
  require(r >= 0.0, "path_loss: distance must be non-negative");
  require(alpha > 2.0, "path_loss: alpha must exceed 2");
  return 1.0 / (1.0 + std::pow(r, alpha));
}

/// Normalized path-loss kernels around the destination, in polar coordinates
/// (r, phi) where phi is measured from the direction of the relay.
class PathLossKernels {
 public:
  PathLossKernels(const NodeLayout& layout, PathLossParams pl)
      : alpha_(pl.alpha),
        relay_distance_(layout.relay_distance()),
        inv_sd_(1.0 + std::pow(layout.source_distance(), pl.alpha)),
        inv_rd_(1.0 + std::pow(layout.relay_distance(), pl.alpha)),
        inv_sr_(1.0 + std::pow(layout.source_relay_distance(), pl.alpha)) {}

  double alpha() const noexcept { return alpha_; }
  double relay_distance() const noexcept { return relay_distance_; }

  /// 1/ℓ(|x_s|), 1/ℓ(|x_r|), 1/ℓ(|x_s - x_r|).
  double inverse_loss_sd() const noexcept { return inv_sd_; }
  double inverse_loss_rd() const noexcept { return inv_rd_; }
  double inverse_loss_sr() const noexcept { return inv_sr_; }

  double loss_at(double r) const { return 1.0 / (1.0 + std::pow(r, alpha_)); }

  /// Path loss from a point at (r, phi) to the relay.
  double loss_to_relay(double r, double phi) const {
    const double d2 = std::max(0.0, r * r + relay_distance_ * relay_distance_ -
                                         2.0 * r * relay_distance_ * std::cos(phi));
    return 1.0 / (1.0 + std::pow(d2, 0.5 * alpha_));
  }

  double sd(double r) const { return inv_sd_ * loss_at(r); }
  double rd(double r) const { return inv_rd_ * loss_at(r); }
  double sr(double r, double phi) const { return inv_sr_ * loss_to_relay(r, phi); }

 private:
  double alpha_;
  double relay_distance_;
  double inv_sd_;
  double inv_rd_;
  double inv_sr_;
};

inline void check_kernel_args(double r, double phi) {
  require(r >= 0.0, "kernel: r must be non-negative");
  require(phi >= 0.0 && phi <= std::numbers::pi, "kernel: phi must lie in [0, pi]");
}

inline double kernel_sd(double r, const NodeLayout& layout, PathLossParams pl) {
  check_kernel_args(r, 0.0);
  return PathLossKernels(layout, pl).sd(r);
}

inline double kernel_rd(double r, const NodeLayout& layout, PathLossParams pl) {
  check_kernel_args(r, 0.0);
  return PathLossKernels(layout, pl).rd(r);
}

inline double kernel_sr(double r, double phi, const NodeLayout& layout, PathLossParams pl) {
  check_kernel_args(r, phi);
  return PathLossKernels(layout, pl).sr(r, phi);
}

/// Area of the intersection of two disks with radii r1, r2 whose centers are d apart.
inline double lens_area(double d, double r1, double r2) {
  require(d >= 0.0 && r1 >= 0.0 && r2 >= 0.0, "lens_area: arguments must be non-negative");
  if (r1 == 0.0 || r2 == 0.0 || d >= r1 + r2) return 0.0;
  if (r1 > r2) std::swap(r1, r2);  // exact symmetry in the radii
  const double small = r1;
  const double big = r2;
  if (d + small <= big) return std::numbers::pi * small * small;

  const auto clamp_cos = [](double c) { return std::clamp(c, -1.0, 1.0); };
  const double a1 = std::acos(clamp_cos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)));
  const double a2 = std::acos(clamp_cos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)));
  const double kite = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
  const double area = r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, kite));
  return std::clamp(area, 0.0, std::numbers::pi * small * small);
}

/// Regions where a single unit-gain interferer alone drives the relay (A_r)
/// or the destination (A_d) into outage, and their overlap.
struct DominantRegions {
  double r1 = 0.0;  // relay ball radius
  double r2 = 0.0;  // destination ball radius
  double area_r = 0.0;
  double area_d = 0.0;
  double area_lens = 0.0;
  bool overlap = false;

  double area_union() const noexcept { return area_r + area_d - area_lens; }
  double lens_fraction_of_union() const noexcept {
    const double u = area_union();
    return u > 0.0 ? area_lens / u : 0.0;
  }
  bool relay_region_empty() const noexcept { return r1 == 0.0; }
  bool destination_region_empty() const noexcept { return r2 == 0.0; }
};

namespace detail {
// (scale - 1)^(1/alpha), or 0 when the ball is empty.
inline double dominance_radius(double scale, double alpha) {
  return scale > 1.0 ? std::pow(scale - 1.0, 1.0 / alpha) : 0.0;
}
}  // namespace detail

/// Relay ball radius uses threshold 1/beta; the destination ball uses 2/beta
/// because the repetition branch doubles the desired power.
inline DominantRegions dominant_regions(const NodeLayout& layout, PathLossParams pl, double beta) {
  require(beta > 0.0, "dominant_regions: beta must be positive");
  const double alpha = pl.alpha;
  DominantRegions out;
  out.r1 = detail::dominance_radius(beta * (1.0 + std::pow(layout.source_relay_distance(), alpha)), alpha);
  out.r2 = detail::dominance_radius(0.5 * beta * (1.0 + std::pow(layout.source_distance(), alpha)), alpha);
  out.area_r = std::numbers::pi * out.r1 * out.r1;
  out.area_d = std::numbers::pi * out.r2 * out.r2;
  const double d = layout.relay_distance();
  out.area_lens = lens_area(d, out.r1, out.r2);
  out.overlap = out.r1 > 0.0 && out.r2 > 0.0 && d <= out.r1 + out.r2;
  return out;
}

}  // namespace sdfrelay::geometry

#endif  // SDFRELAY_GEOMETRY_HPP
