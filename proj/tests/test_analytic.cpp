#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sdfrelay/analytic.hpp"
#include "sdfrelay/montecarlo.hpp"

using namespace sdfrelay;
using namespace sdfrelay::analytic;
using geometry::NetworkConfig;
using geometry::NodeLayout;
using geometry::PathLossParams;

namespace {

NetworkConfig fig2(double lambda, double beta = 0.1) {
  return {NodeLayout({15.0, 0.0}, {6.0, 0.0}), PathLossParams(4.0), beta, lambda};
}

montecarlo::McOutage simulate(const NetworkConfig& cfg, std::uint64_t trials, std::uint64_t seed) {
  montecarlo::SimulationParams sim;
  sim.trials = trials;
  sim.seed = seed;
  return montecarlo::estimate_outage(cfg, FadingSpec::rayleigh(), sim);
}

}  // namespace

TEST(Outage, ZeroDensity) {
  const auto o = outage_rayleigh(fig2(0.0));
  EXPECT_EQ(o.q_bc, 0.0);
  EXPECT_EQ(o.q_mac, 0.0);
  EXPECT_EQ(q_bc_rayleigh(fig2(0.0)), 0.0);
  EXPECT_EQ(q_mac_rayleigh(fig2(0.0)), 0.0);
}

TEST(Outage, Saturation) {
  const auto o = outage_rayleigh(fig2(10.0));
  EXPECT_NEAR(o.q, 1.0, 1e-6);
  EXPECT_NEAR(o.q_bc, 1.0, 1e-6);
}

TEST(Outage, MatchesMonteCarloJointEvents) {
  const auto cfg = fig2(1e-3);
  const auto a = outage_rayleigh(cfg);
  const auto m = simulate(cfg, 200'000, 3);
  EXPECT_NEAR(m.bc.p_hat, a.q_bc, 3.0 * m.bc.se);
  EXPECT_NEAR(m.mac.p_hat, a.q_mac, 3.0 * m.mac.se);
  EXPECT_NEAR(m.total.p_hat, a.q, 3.0 * m.total.se);
}

TEST(Outage, EqualNormGammaBranchMatchesMonteCarlo) {
  const NetworkConfig cfg{NodeLayout({15.0, 0.0}, {0.0, 15.0}), PathLossParams(4.0), 0.1, 1e-3};
  ASSERT_TRUE(equal_norm_branch(cfg));
  const auto a = outage_rayleigh(cfg);
  const auto m = simulate(cfg, 200'000, 5);
  EXPECT_NEAR(m.mac.p_hat, a.q_mac, 3.0 * m.mac.se);
  EXPECT_NEAR(m.bc.p_hat, a.q_bc, 3.0 * m.bc.se);
}

TEST(Outage, GammaBranchIsContinuousLimit) {
  const NetworkConfig equal{NodeLayout({15.0, 0.0}, {0.0, 15.0}), PathLossParams(4.0), 0.1, 2e-3};
  const NetworkConfig near{NodeLayout({15.0, 0.0}, {0.0, 15.0 * (1.0 + 1e-6)}), PathLossParams(4.0), 0.1, 2e-3};
  ASSERT_FALSE(equal_norm_branch(near));
  EXPECT_NEAR(q_mac_rayleigh(near) / q_mac_rayleigh(equal), 1.0, 1e-4);
}

TEST(Outage, MuFormAgreesWithDividedDifference) {
  for (double l : {1e-4, 1e-3, 3e-3, 1e-2}) {
    const auto cfg = fig2(l);
    EXPECT_NEAR(q_mac_mu_form(cfg) / q_mac_rayleigh(cfg), 1.0, 1e-6) << l;
  }
  const NetworkConfig far{NodeLayout({10.0, 5.0}, {-20.0, 3.0}), PathLossParams(3.3), 0.3, 2e-3};
  EXPECT_NEAR(q_mac_mu_form(far) / q_mac_rayleigh(far), 1.0, 1e-6);
}

TEST(Outage, MonotoneInDensityAndThreshold) {
  const auto integrals = outage_integrals(fig2(0.0));
  double pb = 0.0, pm = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto o = integrals.at(1e-5 * std::pow(2.0, i));
    EXPECT_GE(o.q_bc, pb);
    EXPECT_GE(o.q_mac, pm);
    pb = o.q_bc;
    pm = o.q_mac;
  }
  pb = pm = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto o = outage_rayleigh(fig2(1e-3, 0.02 * std::pow(1.5, i)));
    EXPECT_GE(o.q_bc, pb);
    EXPECT_GE(o.q_mac, pm);
    pb = o.q_bc;
    pm = o.q_mac;
  }
}

TEST(Outage, ComplementFormStaysAccurateAtTinyDensity) {
  const auto c = small_lambda_coefficients(fig2(0.0));
  const auto o = outage_rayleigh(fig2(1e-12));
  EXPECT_NEAR(o.q_bc / (1e-12 * c.c_bc), 1.0, 1e-6);
  EXPECT_NEAR(o.q_mac / (1e-12 * c.c_mac), 1.0, 1e-6);
}

TEST(NoRelay, Example) {
  const auto n = q_norelay_rayleigh(15.0, 4.0, 0.1, 1e-4);
  EXPECT_NEAR(n.closed_form_rate, 351.1, 0.05);
  EXPECT_NEAR(n.closed_form, 0.0345, 5e-4);
  const double c = 0.1 * (1.0 + std::pow(15.0, 4.0));
  const double oracle = std::numbers::pi * c / std::sqrt(1.0 + c) * std::numbers::pi / 2.0;
  EXPECT_NEAR(n.exact_rate / oracle, 1.0, 1e-8);
  EXPECT_NEAR(n.exact_rate / n.closed_form_rate, 1.0, 0.05);
  EXPECT_EQ(q_norelay_rayleigh(15.0, 4.0, 0.1, 0.0).exact, 0.0);
}

TEST(SmallLambda, PositiveAndLimit) {
  const auto c = small_lambda_coefficients(fig2(0.0));
  EXPECT_GT(c.c_bc, 0.0);
  EXPECT_GT(c.c_mac, 0.0);
  double prev_gap = 1e9;
  for (double l : {1e-5, 1e-6, 1e-7}) {
    const double gap = std::abs(q_bc_rayleigh(fig2(l)) / (l * c.c_bc) - 1.0);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-4);
}

TEST(SmallLambda, MatchesPsiCombinations) {
  const auto cfg = fig2(0.0);
  const auto bc = broadcast_integrals(cfg);
  const auto c = small_lambda_coefficients(cfg);
  EXPECT_NEAR(bc.psi_dest + bc.psi_relay - bc.psi_joint, c.c_bc, 1e-6 * c.c_bc);
  // c_mac = mu1 E_s - mu2 E_r with E_x = Psi(f, g_x) - Psi(f, 0)
  const geometry::PathLossKernels k(cfg.layout, cfg.path_loss);
  const auto feat = kernel_features(cfg);
  const auto f = [&](double r, double phi) { return 0.1 * k.sr(r, phi); };
  const double p0 = psi(f, ZeroKernel{}, feat, {});
  const double es = psi(f, [&](double r) { return 0.1 * k.sd(r); }, feat, {}) - p0;
  const double er = psi(f, [&](double r) { return 0.1 * k.rd(r); }, feat, {}) - p0;
  const double ls = 1.0 / k.inverse_loss_sd(), lr = 1.0 / k.inverse_loss_rd();
  EXPECT_NEAR((ls * es - lr * er) / (ls - lr), c.c_mac, 1e-5 * c.c_mac);
}

TEST(SmallLambda, VanishWithThreshold) {
  const auto c = small_lambda_coefficients(fig2(0.0, 1e-6));
  const auto ref = small_lambda_coefficients(fig2(0.0));
  EXPECT_LT(c.c_bc, 1e-4 * ref.c_bc);
  EXPECT_LT(c.c_mac, 1e-4 * ref.c_mac);
}

TEST(SmallLambda, PositiveOnRandomConfigurations) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-20.0, 20.0), a(2.5, 6.0), b(0.02, 1.0);
  for (int i = 0; i < 10; ++i) {
    const NetworkConfig cfg{NodeLayout({u(rng), u(rng)}, {u(rng), u(rng)}), PathLossParams(a(rng)), b(rng), 0.0};
    const auto c = small_lambda_coefficients(cfg);
    EXPECT_GT(c.c_bc, 0.0);
    EXPECT_GT(c.c_mac, 0.0);
  }
}
