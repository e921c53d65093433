#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sdfrelay/analytic.hpp"

using namespace sdfrelay;
using namespace sdfrelay::analytic;
using quadrature::PolarFeatures;
using quadrature::QuadratureSettings;

namespace {

// ∫_0^inf 2πr c/(1+c+r^α) dr, from ∫ dt/(A+t^p) = A^{1/p-1} (π/p) csc(π/p).
double psi_oracle(double c, double alpha) {
  const double pi = std::numbers::pi;
  return pi * c * std::pow(1.0 + c, 2.0 / alpha - 1.0) * (2.0 * pi / alpha) / std::sin(2.0 * pi / alpha);
}

PolarFeatures radial_features(double c, double alpha) {
  PolarFeatures f;
  f.alpha = alpha;
  const double rho = std::pow(std::max(c, 1.0), 1.0 / alpha);
  f.origin_radii = {rho, 2.0 * rho};
  return f;
}

const geometry::NetworkConfig kFig2{geometry::NodeLayout({15.0, 0.0}, {6.0, 0.0}), geometry::PathLossParams(4.0),
                                    0.1, 0.0};

}  // namespace

TEST(Psi, ZeroKernels) {
  EXPECT_EQ(psi(ZeroKernel{}, ZeroKernel{}, radial_features(1.0, 4.0), {}), 0.0);
}

TEST(Psi, ClosedFormExample) {
  const double c = 0.05 * (1.0 + std::pow(15.0, 4.0));
  const double v = psi(ZeroKernel{}, [&](double r) { return c / (1.0 + std::pow(r, 4.0)); }, radial_features(c, 4.0), {});
  EXPECT_NEAR(v, 248.2, 0.05);
  EXPECT_NEAR(v / psi_oracle(c, 4.0), 1.0, 1e-8);
}

// The oracle itself, checked by a plain substitution integral independent of the library quadrature.
TEST(Psi, OracleAgainstBruteForce) {
  for (double alpha : {2.5, 4.0, 6.0}) {
    const double c = 3.7;
    // ∫_0^inf 2πr c/(1+c+r^α) dr with r = t/(1-t), midpoint rule on a fine grid
    const int n = 2'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) / n, r = t / (1.0 - t), dr = 1.0 / ((1.0 - t) * (1.0 - t));
      sum += 2.0 * std::numbers::pi * r * c / (1.0 + c + std::pow(r, alpha)) * dr;
    }
    EXPECT_NEAR(sum / n / psi_oracle(c, alpha), 1.0, alpha < 3 ? 2e-3 : 1e-5) << alpha;
  }
}

TEST(Psi, OracleGrid20) {
  for (double alpha : {2.5, 3.0, 4.0, 5.0, 6.0})
    for (double c : {0.01, 1.0, 100.0, 5e4}) {
      const double v = psi(ZeroKernel{}, [&](double r) { return c / (1.0 + std::pow(r, alpha)); },
                           radial_features(c, alpha), {});
      EXPECT_LT(std::abs(v / psi_oracle(c, alpha) - 1.0), 1e-6) << "alpha=" << alpha << " c=" << c;
    }
}

TEST(Psi, PolarRouteMatchesOracle) {
  // f centered on the relay with the same shape as an origin kernel, g = 0:
  // the integral is translation invariant.
  const geometry::PathLossKernels k(kFig2.layout, kFig2.path_loss);
  const double c = 2.0;
  const auto feat = kernel_features(kFig2);
  const double v =
      psi([&](double r, double phi) { return c * k.loss_to_relay(r, phi); }, ZeroKernel{}, feat, {});
  EXPECT_NEAR(v / psi_oracle(c, 4.0), 1.0, 1e-7);
}

TEST(Psi, MonotoneInKernels) {
  const geometry::PathLossKernels k(kFig2.layout, kFig2.path_loss);
  const auto feat = kernel_features(kFig2);
  double prev = 0.0;
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double v = psi([&](double r, double phi) { return s * 0.1 * k.sr(r, phi); },
                         [&](double r) { return 0.05 * k.sd(r); }, feat, {});
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Psi, ToleranceConsistency) {
  const geometry::PathLossKernels k(kFig2.layout, kFig2.path_loss);
  const auto feat = kernel_features(kFig2);
  const auto f = [&](double r, double phi) { return 0.1 * k.sr(r, phi); };
  const auto g = [&](double r) { return 0.05 * k.sd(r); };
  QuadratureSettings loose;
  loose.rel_tol = 1e-4;
  const double tight = psi(f, g, feat, {});
  EXPECT_NEAR(psi(f, g, feat, loose) / tight, 1.0, 1e-4);
}

TEST(Psi, TailTransformChoiceDoesNotMatter) {
  const geometry::PathLossKernels k(kFig2.layout, kFig2.path_loss);
  const auto feat = kernel_features(kFig2);
  const auto f = [&](double r, double phi) { return 0.1 * k.sr(r, phi); };
  const auto g = [&](double r) { return 0.1 * k.sd(r); };
  QuadratureSettings plain;
  plain.radial_transform = false;
  EXPECT_NEAR(psi(f, g, feat, plain) / psi(f, g, feat, {}), 1.0, 1e-7);
}
