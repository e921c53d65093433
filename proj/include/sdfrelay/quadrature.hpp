#pragma once
#ifndef SDFRELAY_QUADRATURE_HPP
#define SDFRELAY_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sdfrelay/types.hpp"

namespace sdfrelay::quadrature {

struct QuadratureSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// Map the radial tail [R, inf) with r = R v^{-1/(alpha-2)}, which flattens
  /// the r^{1-alpha} decay. When false the tail uses the plain 1/(1+t) map.
  bool radial_transform = true;
  unsigned max_depth = 20;

  void validate() const {
    require(rel_tol > 0.0 && abs_tol > 0.0, "quadrature tolerances must be positive");
  }
};

/// Where a polar integrand around the destination changes quickly. Distances
/// listed in relay_radii are measured from the relay, origin_radii from the
/// destination. alpha is the decay exponent of the integrand tail (~ r^{1-alpha}).
struct PolarFeatures {
  double alpha = 4.0;
  double relay_distance = 0.0;
  std::vector<double> relay_radii;
  std::vector<double> origin_radii;
};

namespace detail {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Accumulator {
  double value = 0.0;
  double error = 0.0;
};

inline double allowed(double value, const QuadratureSettings& s) {
  return std::max(s.rel_tol * std::abs(value), s.abs_tol);
}

// GK error estimates are conservative; flag only clear failures.
inline constexpr double kFailureSlack = 10.0;

inline std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
  std::erase_if(v, [&](double x) { return !(x > lo && x < hi) || !std::isfinite(x); });
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }),
          v.end());
  return v;
}

template <class F>
void integrate_segment(F&& f, double a, double b, const QuadratureSettings& s, Accumulator& acc) {
  double err = 0.0;
  const double v = Rule::integrate(f, a, b, s.max_depth, s.rel_tol, &err);
  acc.value += v;
  acc.error += err;
}

inline std::vector<double> radial_breaks(const PolarFeatures& feat) {
  std::vector<double> br = feat.origin_radii;
  if (feat.relay_distance > 0.0) {
    br.push_back(feat.relay_distance);
    for (double rho : feat.relay_radii) {
      br.push_back(feat.relay_distance - rho);
      br.push_back(feat.relay_distance + rho);
    }
  } else {
    br.insert(br.end(), feat.relay_radii.begin(), feat.relay_radii.end());
  }
  return sorted_unique(std::move(br), 0.0, std::numeric_limits<double>::infinity());
}

inline std::vector<double> angular_breaks(double r, const PolarFeatures& feat) {
  std::vector<double> br;
  const double rr = feat.relay_distance;
  if (rr <= 0.0 || r <= 0.0) return br;
  for (double rho : feat.relay_radii) {
    const double c = (r * r + rr * rr - rho * rho) / (2.0 * r * rr);
    if (c > -1.0 && c < 1.0) br.push_back(std::acos(c));
  }
  return sorted_unique(std::move(br), 0.0, std::numbers::pi);
}

// Integrates h(r) over [0, inf) with breakpoints and a tail transform.
template <class H>
Accumulator integrate_half_line(H&& h, const PolarFeatures& feat, const QuadratureSettings& s) {
  Accumulator acc;
  const std::vector<double> br = radial_breaks(feat);
  const double tail_start = 2.0 * (br.empty() ? 1.0 : br.back()) + 1.0;

  double lo = 0.0;
  for (double b : br) {
    integrate_segment(h, lo, b, s, acc);
    lo = b;
  }
  integrate_segment(h, lo, tail_start, s, acc);

  if (s.radial_transform) {
    // r = R v^{-p}, dr = p R v^{-p-1} dv with p = 1/(alpha-2)
    const double p = 1.0 / (feat.alpha - 2.0);
    const auto tail = [&](double v) {
      if (v <= 0.0) return 0.0;
      const double r = tail_start * std::pow(v, -p);
      if (!std::isfinite(r)) return 0.0;
      return h(r) * p * r / v;
    };
    integrate_segment(tail, 0.0, 1.0, s, acc);
  } else {
    const auto tail = [&](double u) {
      if (u <= 0.0) return 0.0;
      const double t = (1.0 - u) / u;  // t in [0, inf)
      return h(tail_start + t) / (u * u);
    };
    integrate_segment(tail, 0.0, 1.0, s, acc);
  }
  return acc;
}

}  // namespace detail

/// ∫_0^inf 2 pi r h(r) dr for a radially symmetric integrand.
template <class H>
double integrate_radial(H&& h, const PolarFeatures& feat, const QuadratureSettings& s) {
  s.validate();
  const auto weighted = [&](double r) { return 2.0 * std::numbers::pi * r * h(r); };
  const detail::Accumulator acc = detail::integrate_half_line(weighted, feat, s);
  if (!std::isfinite(acc.value) || acc.error > detail::kFailureSlack * detail::allowed(acc.value, s))
    throw QuadratureError("radial integral did not converge", acc.error);
  return acc.value;
}

/// ∫_0^inf ∫_0^pi 2 r h(r, phi) dphi dr, i.e. the plane integral of an
/// integrand symmetric about the destination-relay axis. Inner integral over
/// phi, outer over r.
template <class H>
double integrate_polar(H&& h, const PolarFeatures& feat, const QuadratureSettings& s) {
  s.validate();
  QuadratureSettings inner_s = s;
  inner_s.rel_tol = 0.1 * s.rel_tol;
  double worst_inner = 0.0;
  double inner_err_sum = 0.0;

  const auto radial = [&](double r) {
    detail::Accumulator inner;
    const auto g = [&](double phi) { return h(r, phi); };
    double lo = 0.0;
    for (double b : detail::angular_breaks(r, feat)) {
      detail::integrate_segment(g, lo, b, inner_s, inner);
      lo = b;
    }
    detail::integrate_segment(g, lo, std::numbers::pi, inner_s, inner);
    const double tol = std::max(inner_s.rel_tol * std::abs(inner.value), std::numeric_limits<double>::min());
    worst_inner = std::max(worst_inner, inner.error / tol);
    inner_err_sum += inner.error;
    return 2.0 * r * inner.value;
  };

  const detail::Accumulator acc = detail::integrate_half_line(radial, feat, s);
  if (!std::isfinite(acc.value) || acc.error > detail::kFailureSlack * detail::allowed(acc.value, s))
    throw QuadratureError("polar integral did not converge in r", acc.error);
  if (worst_inner > detail::kFailureSlack && inner_err_sum > detail::allowed(acc.value, s))
    throw QuadratureError("polar integral did not converge in phi", inner_err_sum);
  return acc.value;
}

}  // namespace sdfrelay::quadrature

#endif  // SDFRELAY_QUADRATURE_HPP
