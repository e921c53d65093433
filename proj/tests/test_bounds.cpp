#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sdfrelay/bounds.hpp"

using namespace sdfrelay;
using namespace sdfrelay::bounds;
using geometry::NetworkConfig;
using geometry::NodeLayout;
using geometry::PathLossParams;

namespace {

NetworkConfig cfg_at(double lambda, Point2 relay = {6.0, 0.0}, double beta = 0.1) {
  return {NodeLayout({15.0, 0.0}, relay), PathLossParams(4.0), beta, lambda};
}

montecarlo::SimulationParams trials(std::uint64_t n, std::uint64_t seed = 1) {
  montecarlo::SimulationParams s;
  s.trials = n;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(FadingMarksBound, ZeroDensity) { EXPECT_EQ(q_bc_lower_bound_fading_marks(cfg_at(0.0)), 0.0); }

TEST(FadingMarksBound, LargeThresholdSaturates) {
  // the dominant set grows with beta; at beta = 100 its mean size is ~2e3 / λ-unit
  EXPECT_NEAR(q_bc_lower_bound_fading_marks(cfg_at(1e-2, {6.0, 0.0}, 100.0)), 1.0, 1e-3);
  double prev = 0.0;
  for (double beta : {0.1, 1.0, 10.0, 100.0}) {
    const double b = q_bc_lower_bound_fading_marks(cfg_at(1e-3, {6.0, 0.0}, beta));
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(FadingMarksBound, BelowMonteCarlo) {
  for (double l : {1e-3, 3e-3}) {
    const auto cfg = cfg_at(l);
    const double b = q_bc_lower_bound_fading_marks(cfg);
    const auto m = montecarlo::estimate_outage(cfg, FadingSpec::mixed_u1(), trials(100'000)).bc;
    EXPECT_LE(b, m.p_hat + 3.0 * m.se) << l;
  }
}

TEST(FadingMarksBound, LinearInDensityNearZero) {
  const double rate = jointly_dominant_rate(cfg_at(0.0), DominantSetSpec<>::for_beta(0.1));
  EXPECT_GT(rate, 0.0);
  EXPECT_NEAR(q_bc_lower_bound_fading_marks(cfg_at(1e-7)) / 1e-7, rate, 1e-5 * rate);
}

TEST(FadingMarksBound, PolarAndCartesianRoutesAgree) {
  quadrature::QuadratureSettings s;
  s.rel_tol = 1e-7;
  for (const auto& cfg : {cfg_at(0.0), NetworkConfig{NodeLayout({15.0, 0.0}, {6.0, 0.0}), PathLossParams(3.3), 0.1, 0.0},
                          NetworkConfig{NodeLayout({8.0, 9.0}, {-3.0, 4.0}), PathLossParams(4.0), 0.2, 0.0}}) {
    const auto spec = DominantSetSpec<>::for_beta(cfg.beta);
    const double polar = jointly_dominant_rate(cfg, spec);
    EXPECT_NEAR(jointly_dominant_rate_cartesian(cfg, spec, s) / polar, 1.0, 1e-6);
  }
}

TEST(FadingMarksBound, AcceptsOtherTailLaws) {
  // exponential marks with mean m are Rayleigh marks with thresholds divided by m
  struct MeanTwoTail {
    double operator()(double x) const { return x <= 0.0 ? 1.0 : std::exp(-0.5 * x); }
  };
  const auto cfg = cfg_at(0.0);
  const DominantSetSpec<MeanTwoTail, MeanTwoTail> scaled{10.0, 20.0};
  const DominantSetSpec<> halved{5.0, 10.0};
  EXPECT_NEAR(jointly_dominant_rate(cfg, scaled) / jointly_dominant_rate(cfg, halved), 1.0, 1e-9);
}

TEST(PathlossAsymptotic, OverlapDisjointTangentDegenerate) {
  const auto over = q_bc_asymptotic_pathloss_only(cfg_at(0.0));
  EXPECT_EQ(over.order, 1);
  EXPECT_NEAR(over.coefficient, 44.6, 0.1);

  const auto dis = q_bc_asymptotic_pathloss_only(cfg_at(0.0, {30.0, 0.0}));
  const auto& g = dis.regions;
  ASSERT_LT(g.r1 + g.r2, 30.0);
  EXPECT_EQ(dis.order, 2);
  EXPECT_NEAR(dis.coefficient, std::numbers::pi * g.r1 * g.r1 * std::numbers::pi * g.r2 * g.r2, 1e-9);

  const auto empty = q_bc_asymptotic_pathloss_only(cfg_at(0.0, {14.5, 0.0}));
  EXPECT_TRUE(empty.degenerate);
}

TEST(PathlossAsymptotic, TangentCaseIsOrderOneWithZeroCoefficient) {
  geometry::DominantRegions g;
  g.r1 = 3.0;
  g.r2 = 4.0;
  g.area_r = std::numbers::pi * 9.0;
  g.area_d = std::numbers::pi * 16.0;
  g.area_lens = geometry::lens_area(7.0, 3.0, 4.0);
  EXPECT_EQ(g.area_lens, 0.0);
  // lens empty: the dominant probability reduces to the product of the two ball events
  const double l = 1e-3;
  EXPECT_NEAR(q_bc_dominant_pathloss_only(g, l), (-std::expm1(-l * g.area_r)) * (-std::expm1(-l * g.area_d)), 1e-15);
}

TEST(PathlossDominant, ExpansionCoefficients) {
  const auto over = q_bc_asymptotic_pathloss_only(cfg_at(0.0));
  EXPECT_NEAR(q_bc_dominant_pathloss_only(over.regions, 1e-8) / 1e-8, over.coefficient, 1e-5 * over.coefficient);
  const auto dis = q_bc_asymptotic_pathloss_only(cfg_at(0.0, {30.0, 0.0}));
  EXPECT_NEAR(q_bc_dominant_pathloss_only(dis.regions, 1e-8) / 1e-16, dis.coefficient, 1e-5 * dis.coefficient);
  EXPECT_EQ(q_bc_dominant_pathloss_only(over.regions, 0.0), 0.0);
}

TEST(PathlossDominant, OverlapCoefficientFromMonteCarlo) {
  // q_BC / λ approaches |A_r,d| as λ -> 0
  const auto m = montecarlo::estimate_outage(cfg_at(1e-4), FadingSpec::pathloss_only(), trials(1'000'000)).bc;
  const auto over = q_bc_asymptotic_pathloss_only(cfg_at(0.0));
  EXPECT_NEAR(m.p_hat / 1e-4 / over.coefficient, 1.0, 0.10);
}

TEST(NearestInterferer, Examples) {
  EXPECT_EQ(nearest_interferer_equivalence(1, 0.0, 1.0, 4.0), 0.0);
  EXPECT_NEAR(nearest_interferer_equivalence(1, 0.01, 1.0, 4.0), -std::expm1(-0.01 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(nearest_interferer_equivalence(1, 0.01, 1.0, 4.0), 0.03093, 1e-5);
}

TEST(NearestInterferer, MatchesPoissonSum) {
  for (unsigned n : {1u, 2u, 3u, 5u})
    for (double z : {0.01, 0.5, 3.0}) {
      // P(at least n points) with mean z
      double tail = 1.0, term = std::exp(-z);
      for (unsigned k = 0; k < n; ++k) {
        tail -= term;
        term *= z / (k + 1);
      }
      const double lambda = z / std::numbers::pi;  // eps = 1 gives a unit-radius ball
      EXPECT_NEAR(nearest_interferer_equivalence(n, lambda, 1.0, 4.0), tail, 1e-12);
    }
}

TEST(NearestInterferer, OrderedInN) {
  for (double l : {1e-3, 1e-2, 0.3})
    for (double eps : {0.1, 1.0, 10.0})
      EXPECT_LE(nearest_interferer_equivalence(2, l, eps, 4.0), nearest_interferer_equivalence(1, l, eps, 4.0));
}

TEST(Tightness, RejectsZeroDensity) {
  EXPECT_THROW(tightness_diagnostic(cfg_at(0.0), {1e-3, 0.0}, trials(10)), DomainError);
}

TEST(Tightness, RatioAtLeastOneAndDecreasing) {
  const auto rows = tightness_diagnostic(cfg_at(0.0), {1e-2, 1e-3}, trials(100'000));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].ratio, rows[1].ratio);
  for (const auto& r : rows) EXPECT_GE(r.mc.p_hat + 3.0 * r.mc.se, r.bound);
}

TEST(Independence, DisjointCrescentEventsUncorrelated) {
  // occupancy of A_r \ A_d and A_d \ A_r in the simulated field
  const auto cfg = cfg_at(3e-3);
  const auto g = geometry::dominant_regions(cfg.layout, cfg.path_loss, cfg.beta);
  const auto sim = trials(1);
  const Point2 xr = cfg.layout.relay();
  const int n = 100'000;
  double a = 0, b = 0, ab = 0;
  for (int t = 0; t < n; ++t) {
    const auto s = montecarlo::sample_snapshot(cfg, FadingSpec::pathloss_only(), sim, t);
    bool in_r = false, in_d = false;
    for (auto p : s.locations) {
      const bool r = (p - xr).norm() < g.r1, d = p.norm() < g.r2;
      in_r |= r && !d;
      in_d |= d && !r;
    }
    a += in_r;
    b += in_d;
    ab += in_r && in_d;
  }
  a /= n;
  b /= n;
  ab /= n;
  const double cov = ab - a * b;
  const double corr = cov / std::sqrt(a * (1 - a) * b * (1 - b));
  EXPECT_NEAR(corr, 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
}
