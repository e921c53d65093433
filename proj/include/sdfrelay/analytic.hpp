#pragma once
#ifndef SDFRELAY_ANALYTIC_HPP
#define SDFRELAY_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>

#include "sdfrelay/geometry.hpp"
#include "sdfrelay/quadrature.hpp"

namespace sdfrelay::analytic {

using geometry::NetworkConfig;
using quadrature::PolarFeatures;
using quadrature::QuadratureSettings;

/// Placeholder for an identically zero kernel argument of psi().
struct ZeroKernel {
  constexpr double operator()(double) const noexcept { return 0.0; }
  constexpr double operator()(double, double) const noexcept { return 0.0; }
};

/// Psi(f, g) = ∫_0^inf ∫_0^pi 2r (1 - 1/((1+f(r,phi))(1+g(r)))) dphi dr.
///
/// f is a kernel of (r, phi) centered on the relay direction, g a radial
/// kernel around the destination. Pass ZeroKernel for a vanishing argument;
/// with f = 0 the angular integral is done in closed form.
template <class F, class G>
double psi(F&& f, G&& g, const PolarFeatures& features, const QuadratureSettings& settings) {
  constexpr bool f_zero = std::is_same_v<std::remove_cvref_t<F>, ZeroKernel>;
  constexpr bool g_zero = std::is_same_v<std::remove_cvref_t<G>, ZeroKernel>;
  if constexpr (f_zero && g_zero) {
    return 0.0;
  } else if constexpr (f_zero) {
    return quadrature::integrate_radial(
        [&](double r) {
          const double gv = g(r);
          return gv / (1.0 + gv);
        },
        features, settings);
  } else {
    return quadrature::integrate_polar(
        [&](double r, double phi) {
          const double fv = f(r, phi);
          const double gv = g_zero ? 0.0 : g(r);
          // 1 - 1/((1+f)(1+g)) without cancellation for small kernels
          return (fv + gv + fv * gv) / ((1.0 + fv) * (1.0 + gv));
        },
        features, settings);
  }
}

namespace detail {

inline double feature_radius(double amplitude, double alpha) {
  return std::pow(std::max(amplitude, 1.0), 1.0 / alpha);
}

}  // namespace detail

/// Quadrature breakpoints for the kernels beta*l*_sr and c*beta*l*_{sd,rd}.
inline PolarFeatures kernel_features(const NetworkConfig& cfg) {
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const double a = cfg.alpha();
  PolarFeatures feat;
  feat.alpha = a;
  feat.relay_distance = k.relay_distance();
  const double rho_f = detail::feature_radius(cfg.beta * k.inverse_loss_sr(), a);
  feat.relay_radii = {0.5 * rho_f, rho_f, 2.0 * rho_f};
  for (double amp : {0.5 * cfg.beta * k.inverse_loss_sd(), cfg.beta * k.inverse_loss_sd(),
                     cfg.beta * k.inverse_loss_rd()}) {
    const double rho = detail::feature_radius(amp, a);
    feat.origin_radii.push_back(rho);
    feat.origin_radii.push_back(2.0 * rho);
  }
  return feat;
}

/// λ-free integrals that fix q_BC under Rayleigh fading.
struct BroadcastIntegrals {
  double psi_dest = 0.0;   // Psi(0, (beta/2) l*_sd)
  double psi_relay = 0.0;  // Psi(beta l*_sr, 0)
  double psi_joint = 0.0;  // Psi(beta l*_sr, (beta/2) l*_sd)
  double linear = 0.0;     // psi_dest + psi_relay - psi_joint, integrated directly
};

/// λ-free integrals that fix q_MAC under Rayleigh fading.
struct MacIntegrals {
  double psi_relay = 0.0;   // Psi(beta l*_sr, 0)
  double excess_sd = 0.0;   // Psi(beta l*_sr, beta l*_sd) - psi_relay, integrated directly
  double divided = 0.0;     // ∫∫ 2r beta l(r) / ((1+f)(1+g_s)(1+g_r)), or the Gamma-branch term
  double linear = 0.0;      // small-λ coefficient, integrated directly
  double kappa_s = 0.0;     // 1/l(|x_s|)
  double kappa_r = 0.0;     // 1/l(|x_r|)
  bool equal_norm = false;  // |x_s| = |x_r|: Gamma(2) tail of the combined desired power
};

/// True when l(|x_s|) and l(|x_r|) agree to 1e-9 relative; the MAC phase then
/// uses the Gamma(2) law for u_sd l(|x_s|) + u_rd l(|x_r|).
inline bool equal_norm_branch(const NetworkConfig& cfg) {
  const double ls = geometry::path_loss(cfg.layout.source_distance(), cfg.alpha());
  const double lr = geometry::path_loss(cfg.layout.relay_distance(), cfg.alpha());
  return std::abs(ls - lr) < 1e-9 * ls;
}

inline BroadcastIntegrals broadcast_integrals(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const PolarFeatures feat = kernel_features(cfg);
  const double beta = cfg.beta;
  const auto f = [&](double r, double phi) { return beta * k.sr(r, phi); };
  const auto a = [&](double r) { return 0.5 * beta * k.sd(r); };

  BroadcastIntegrals out;
  out.psi_dest = psi(ZeroKernel{}, a, feat, settings);
  out.psi_relay = psi(f, ZeroKernel{}, feat, settings);
  out.psi_joint = psi(f, a, feat, settings);
  out.linear = quadrature::integrate_polar(
      [&](double r, double phi) {
        const double fv = f(r, phi), av = a(r);
        return fv * av / ((1.0 + fv) * (1.0 + av));
      },
      feat, settings);
  return out;
}

inline MacIntegrals mac_integrals(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const PolarFeatures feat = kernel_features(cfg);
  const double beta = cfg.beta;
  const auto f = [&](double r, double phi) { return beta * k.sr(r, phi); };
  const auto gs = [&](double r) { return beta * k.sd(r); };
  const auto gr = [&](double r) { return beta * k.rd(r); };

  MacIntegrals out;
  out.kappa_s = k.inverse_loss_sd();
  out.kappa_r = k.inverse_loss_rd();
  out.equal_norm = equal_norm_branch(cfg);
  out.psi_relay = psi(f, ZeroKernel{}, feat, settings);
  out.excess_sd = quadrature::integrate_polar(
      [&](double r, double phi) {
        const double fv = f(r, phi), g = gs(r);
        return g / ((1.0 + fv) * (1.0 + g));
      },
      feat, settings);
  if (out.equal_norm) {
    out.divided = quadrature::integrate_polar(
        [&](double r, double phi) {
          const double fv = f(r, phi), g = gs(r);
          return g / ((1.0 + fv) * (1.0 + g) * (1.0 + g));
        },
        feat, settings);
  } else {
    out.divided = quadrature::integrate_polar(
        [&](double r, double phi) {
          const double fv = f(r, phi);
          return beta * k.loss_at(r) / ((1.0 + fv) * (1.0 + gs(r)) * (1.0 + gr(r)));
        },
        feat, settings);
  }
  out.linear = quadrature::integrate_polar(
      [&](double r, double phi) {
        const double fv = f(r, phi), s = gs(r), q = out.equal_norm ? s : gr(r);
        return s * q / ((1.0 + fv) * (1.0 + s) * (1.0 + q));
      },
      feat, settings);
  return out;
}

namespace detail {
inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }
}  // namespace detail

/// q_BC at density lambda: 1 - e^{-λΨ_d} - e^{-λΨ_r} + e^{-λΨ_rd}, evaluated as
/// expm1(-λΨ_d) expm1(-λΨ_r) - e^{-λΨ_rd} expm1(-λ c_bc).
inline double q_bc_from(const BroadcastIntegrals& in, double lambda) {
  const double q = std::expm1(-lambda * in.psi_dest) * std::expm1(-lambda * in.psi_relay) -
                   std::exp(-lambda * in.psi_joint) * std::expm1(-lambda * in.linear);
  return detail::clamp_probability(q);
}

/// q_MAC at density lambda. The two mu-weighted exponentials are combined
/// into a divided difference in 1/l, which stays finite as |x_s| -> |x_r|.
inline double q_mac_from(const MacIntegrals& in, double lambda) {
  const double psi_sd = in.psi_relay + in.excess_sd;  // Psi(beta l*_sr, beta l*_sd)
  const double first = -std::exp(-lambda * in.psi_relay) * std::expm1(-lambda * in.excess_sd);
  double second = 0.0;
  if (in.equal_norm) {
    second = -std::exp(-lambda * psi_sd) * lambda * in.divided;
  } else {
    const double dk = in.kappa_r - in.kappa_s;
    const double x = -lambda * dk * in.divided;
    if (std::abs(x) < 1.0) {
      second = in.kappa_s * std::exp(-lambda * psi_sd) * std::expm1(x) / dk;
    } else {
      // Psi(beta l*_sr, beta l*_rd) = psi_sd + dk * divided
      second = in.kappa_s * (std::exp(-lambda * (psi_sd + dk * in.divided)) - std::exp(-lambda * psi_sd)) / dk;
    }
  }
  return detail::clamp_probability(first + second);
}

inline double q_bc_rayleigh(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  if (cfg.lambda == 0.0) return 0.0;
  return q_bc_from(broadcast_integrals(cfg, settings), cfg.lambda);
}

inline double q_mac_rayleigh(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  if (cfg.lambda == 0.0) return 0.0;
  return q_mac_from(mac_integrals(cfg, settings), cfg.lambda);
}

/// Both phases, sharing nothing but the configuration.
struct OutageIntegrals {
  BroadcastIntegrals bc;
  MacIntegrals mac;

  OutageBreakdown at(double lambda) const {
    if (lambda == 0.0) return OutageBreakdown::make(0.0, 0.0, Method::analytic);
    return OutageBreakdown::make(q_bc_from(bc, lambda), q_mac_from(mac, lambda), Method::analytic);
  }
};

inline OutageIntegrals outage_integrals(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  return {broadcast_integrals(cfg, settings), mac_integrals(cfg, settings)};
}

inline OutageBreakdown outage_rayleigh(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  return outage_integrals(cfg, settings).at(cfg.lambda);
}

/// q_MAC as the literal three-term mu-weighted sum of exponentials. Kept as
/// an independent evaluation route; loses accuracy when |x_s| ~ |x_r|.
inline double q_mac_mu_form(const NetworkConfig& cfg, const QuadratureSettings& settings = {}) {
  require(!equal_norm_branch(cfg), "q_mac_mu_form: requires |x_s| != |x_r|");
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const PolarFeatures feat = kernel_features(cfg);
  const double beta = cfg.beta, lambda = cfg.lambda;
  const auto f = [&](double r, double phi) { return beta * k.sr(r, phi); };
  const auto gs = [&](double r) { return beta * k.sd(r); };
  const auto gr = [&](double r) { return beta * k.rd(r); };
  const double ls = 1.0 / k.inverse_loss_sd(), lr = 1.0 / k.inverse_loss_rd();
  const double mu1 = ls / (ls - lr), mu2 = lr / (ls - lr);
  const double q = std::exp(-lambda * psi(f, ZeroKernel{}, feat, settings)) -
                   mu1 * std::exp(-lambda * psi(f, gs, feat, settings)) +
                   mu2 * std::exp(-lambda * psi(f, gr, feat, settings));
  return q;
}

/// Direct transmission without relay.
struct NoRelayOutage {
  double exact = 0.0;          // 1 - exp(-λ Psi(0, beta l*_sd))
  double closed_form = 0.0;    // singular-law closed form
  double exact_rate = 0.0;     // Psi(0, beta l*_sd), i.e. -log(1-q)/λ
  double closed_form_rate = 0.0;
};

inline double norelay_closed_form_rate(double source_distance, double alpha, double beta) {
  const double delta = 2.0 / alpha;
  return std::numbers::pi * std::numbers::pi * delta * source_distance * source_distance *
         std::pow(beta, delta) / std::sin(delta * std::numbers::pi);
}

inline NoRelayOutage q_norelay_rayleigh(double source_distance, double alpha, double beta, double lambda,
                                        const QuadratureSettings& settings = {}) {
  require(source_distance > 0.0, "q_norelay_rayleigh: source distance must be positive");
  require(alpha > 2.0, "q_norelay_rayleigh: alpha must exceed 2");
  require(beta > 0.0 && lambda >= 0.0, "q_norelay_rayleigh: need beta > 0, lambda >= 0");
  const double c = beta * (1.0 + std::pow(source_distance, alpha));
  PolarFeatures feat;
  feat.alpha = alpha;
  const double rho = detail::feature_radius(c, alpha);
  feat.origin_radii = {rho, 2.0 * rho};
  NoRelayOutage out;
  out.exact_rate = psi(ZeroKernel{}, [&](double r) { return c / (1.0 + std::pow(r, alpha)); }, feat, settings);
  out.closed_form_rate = norelay_closed_form_rate(source_distance, alpha, beta);
  out.exact = -std::expm1(-lambda * out.exact_rate);
  out.closed_form = -std::expm1(-lambda * out.closed_form_rate);
  return out;
}

/// Linear coefficients of q_BC and q_MAC as λ -> 0.
struct SmallLambdaCoefficients {
  double c_bc = 0.0;
  double c_mac = 0.0;
  double total() const noexcept { return c_bc + c_mac; }
};

inline SmallLambdaCoefficients small_lambda_coefficients(const NetworkConfig& cfg,
                                                         const QuadratureSettings& settings = {}) {
  // Both integrands are products of kernels, so positivity is manifest.
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const PolarFeatures feat = kernel_features(cfg);
  const double beta = cfg.beta;
  const bool equal = equal_norm_branch(cfg);
  SmallLambdaCoefficients out;
  out.c_bc = quadrature::integrate_polar(
      [&](double r, double phi) {
        const double f = beta * k.sr(r, phi), a = 0.5 * beta * k.sd(r);
        return f * a / ((1.0 + f) * (1.0 + a));
      },
      feat, settings);
  out.c_mac = quadrature::integrate_polar(
      [&](double r, double phi) {
        const double f = beta * k.sr(r, phi), s = beta * k.sd(r), q = equal ? s : beta * k.rd(r);
        return s * q / ((1.0 + f) * (1.0 + s) * (1.0 + q));
      },
      feat, settings);
  return out;
}

}  // namespace sdfrelay::analytic

#endif  // SDFRELAY_ANALYTIC_HPP
