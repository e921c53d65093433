#pragma once
#ifndef SDFRELAY_MONTECARLO_HPP
#define SDFRELAY_MONTECARLO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <boost/random/exponential_distribution.hpp>

#include "sdfrelay/geometry.hpp"
#include "sdfrelay/types.hpp"

namespace sdfrelay::montecarlo {

using geometry::NetworkConfig;

/// xoshiro256** seeded through splitmix64 from (seed, trial_index), so every
/// trial owns an independent, reproducible stream.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(std::uint64_t seed, std::uint64_t trial_index) {
    std::uint64_t sm = seed ^ (0x9E3779B97F4A7C15ULL * (trial_index + 1));
    sm = splitmix(sm) ^ trial_index;
    for (auto& w : state_) w = splitmix(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Unit-mean exponential (ziggurat).
  double exponential() { return boost::random::exponential_distribution<double>{}(*this); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix(std::uint64_t& x) noexcept {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

struct SimulationParams {
  /// Radius of the simulation disk around the destination; 0 selects it automatically.
  double window_radius = 0.0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  /// 0 means one thread per hardware core. Never changes results.
  unsigned threads = 0;

  void validate() const {
    require(trials >= 1, "trials must be at least 1");
    require(window_radius >= 0.0 && std::isfinite(window_radius), "window radius must be finite and >= 0");
  }
};

/// Smallest disk radius for which the mean interference beyond it,
/// 2 pi λ R^{2-alpha} / (alpha-2), stays below 1e-3 of the weakest desired
/// signal scaled by 1/beta. Never below 100 or 5 max(|x_s|, |x_r|).
inline double auto_window_radius(const NetworkConfig& cfg) {
  const auto& l = cfg.layout;
  const double a = cfg.alpha();
  double r = std::max(100.0, 5.0 * std::max(l.source_distance(), l.relay_distance()));
  if (cfg.lambda > 0.0) {
    const double weakest = std::min({geometry::path_loss(l.source_relay_distance(), a),
                                     geometry::path_loss(l.source_distance(), a),
                                     geometry::path_loss(l.relay_distance(), a)});
    const double floor = 1e-3 * weakest / cfg.beta;
    const double r_eps = std::pow(2.0 * std::numbers::pi * cfg.lambda / ((a - 2.0) * floor), 1.0 / (a - 2.0));
    r = std::max(r, r_eps);
  }
  return r;
}

inline double resolve_window(const NetworkConfig& cfg, const SimulationParams& sim) {
  return sim.window_radius > 0.0 ? sim.window_radius : auto_window_radius(cfg);
}

/// One realization of the marked interferer field and the desired-link gains.
struct Snapshot {
  std::vector<Point2> locations;
  std::vector<double> g;  // interferer -> relay marks
  std::vector<double> h;  // interferer -> destination marks
  double u_sr = 1.0;
  double u_sd = 1.0;
  double u_rd = 1.0;

  std::size_t size() const noexcept { return locations.size(); }
};

namespace detail {
inline double draw(Fading f, TrialRng& rng) { return f == Fading::rayleigh ? rng.exponential() : 1.0; }
}  // namespace detail

/// Refills `out` with the snapshot for (seed, trial_index). Draw order is fixed:
/// u_sr, u_sd, u_rd, the Poisson count, then (position, g, h) per point.
inline void sample_snapshot_into(const NetworkConfig& cfg, const FadingSpec& fading, double window_radius,
                                 std::uint64_t seed, std::uint64_t trial_index, Snapshot& out) {
  TrialRng rng(seed, trial_index);
  out.u_sr = detail::draw(fading.desired, rng);
  out.u_sd = detail::draw(fading.desired, rng);
  out.u_rd = detail::draw(fading.desired, rng);
  out.locations.clear();
  out.g.clear();
  out.h.clear();
  const double mean = cfg.lambda * std::numbers::pi * window_radius * window_radius;
  if (mean <= 0.0) return;
  std::poisson_distribution<std::int64_t> count_dist(mean);
  const auto n = static_cast<std::size_t>(count_dist(rng));
  out.locations.reserve(n);
  out.g.reserve(n);
  out.h.reserve(n);
  const double r2 = window_radius * window_radius;
  for (std::size_t i = 0; i < n; ++i) {
    // uniform on the disk by rejection from the bounding square
    Point2 p;
    do {
      p = {window_radius * (2.0 * rng.uniform() - 1.0), window_radius * (2.0 * rng.uniform() - 1.0)};
    } while (p.norm2() >= r2);
    out.locations.push_back(p);
    out.g.push_back(detail::draw(fading.mark_g, rng));
    out.h.push_back(detail::draw(fading.mark_h, rng));
  }
}

inline Snapshot sample_snapshot(const NetworkConfig& cfg, const FadingSpec& fading, const SimulationParams& sim,
                                std::uint64_t trial_index) {
  Snapshot s;
  sample_snapshot_into(cfg, fading, resolve_window(cfg, sim), sim.seed, trial_index, s);
  return s;
}

struct InterferencePair {
  double relay = 0.0;        // I_r
  double destination = 0.0;  // I_d
};

/// I_r = sum g_i l(|x_i - x_r|), I_d = sum h_i l(|x_i|) over the same locations.
inline InterferencePair interference_pair(const Snapshot& s, const geometry::NodeLayout& layout,
                                          geometry::PathLossParams pl) {
  const Point2 xr = layout.relay();
  const double half = 0.5 * pl.alpha;
  const bool quartic = pl.alpha == 4.0;
  const auto loss2 = [&](double d2) { return 1.0 / (1.0 + (quartic ? d2 * d2 : std::pow(d2, half))); };
  InterferencePair out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Point2 x = s.locations[i];
    out.relay += s.g[i] * loss2((x - xr).norm2());
    out.destination += s.h[i] * loss2(x.norm2());
  }
  return out;
}

enum class SdfOutcome { success, bc_outage, mac_outage };

/// Per-phase decoding conditions, written as signal >= beta * interference so
/// that zero interference means infinite SIR.
struct SdfDecision {
  bool relay_decodes = false;      // SIR_sr >= beta
  bool repetition_ok = false;      // SIR_sd >= beta, source repeats with power 2
  bool combined_ok = false;        // SIR_srd >= beta, relay forwards
};

inline SdfDecision sdf_decision(const Snapshot& s, const NetworkConfig& cfg, InterferencePair in) {
  const auto& l = cfg.layout;
  const double a = cfg.alpha();
  const double l_sr = geometry::path_loss(l.source_relay_distance(), a);
  const double l_s = geometry::path_loss(l.source_distance(), a);
  const double l_r = geometry::path_loss(l.relay_distance(), a);
  SdfDecision d;
  d.relay_decodes = s.u_sr * l_sr >= cfg.beta * in.relay;
  d.repetition_ok = 2.0 * s.u_sd * l_s >= cfg.beta * in.destination;
  d.combined_ok = s.u_sd * l_s + s.u_rd * l_r >= cfg.beta * in.destination;
  return d;
}

inline SdfOutcome classify(const SdfDecision& d) {
  if (!d.relay_decodes) return d.repetition_ok ? SdfOutcome::success : SdfOutcome::bc_outage;
  return d.combined_ok ? SdfOutcome::success : SdfOutcome::mac_outage;
}

inline SdfOutcome classify_sdf(const Snapshot& s, const NetworkConfig& cfg) {
  return classify(sdf_decision(s, cfg, interference_pair(s, cfg.layout, cfg.path_loss)));
}

struct McEstimate {
  double p_hat = 0.0;
  double se = 0.0;
  std::uint64_t events = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  static McEstimate from_counts(std::uint64_t events, std::uint64_t trials, std::uint64_t seed) {
    McEstimate e;
    e.events = events;
    e.trials = trials;
    e.seed = seed;
    e.p_hat = static_cast<double>(events) / static_cast<double>(trials);
    e.se = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(trials));
    return e;
  }
};

struct McOutage {
  OutageBreakdown breakdown;
  McEstimate bc;
  McEstimate mac;
  McEstimate total;
  double window_radius = 0.0;
};

inline unsigned resolve_threads(unsigned requested, std::uint64_t trials) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, trials));
}

/// Runs `body(first, last, partial)` over disjoint trial blocks and sums the
/// per-block integer partials; block boundaries do not affect the totals.
template <class Partial, class Body>
Partial parallel_trials(std::uint64_t trials, unsigned threads, Body&& body) {
  const unsigned n = resolve_threads(threads, trials);
  std::vector<Partial> partial(n);
  if (n == 1) {
    body(std::uint64_t{0}, trials, partial[0]);
    return partial[0];
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    const std::uint64_t first = trials * t / n, last = trials * (t + 1) / n;
    pool.emplace_back([&, t, first, last] { body(first, last, partial[t]); });
  }
  pool.clear();
  Partial total{};
  for (const auto& p : partial) total += p;
  return total;
}

struct OutcomeCounts {
  std::uint64_t bc = 0;
  std::uint64_t mac = 0;

  OutcomeCounts& operator+=(const OutcomeCounts& o) {
    bc += o.bc;
    mac += o.mac;
    return *this;
  }
};

/// Outage frequencies of the SDF protocol over independent snapshots.
inline McOutage estimate_outage(const NetworkConfig& cfg, const FadingSpec& fading, const SimulationParams& sim) {
  sim.validate();
  const double radius = resolve_window(cfg, sim);
  const auto counts = parallel_trials<OutcomeCounts>(
      sim.trials, sim.threads, [&](std::uint64_t first, std::uint64_t last, OutcomeCounts& acc) {
        Snapshot snap;
        for (std::uint64_t t = first; t < last; ++t) {
          sample_snapshot_into(cfg, fading, radius, sim.seed, t, snap);
          switch (classify_sdf(snap, cfg)) {
            case SdfOutcome::bc_outage: ++acc.bc; break;
            case SdfOutcome::mac_outage: ++acc.mac; break;
            case SdfOutcome::success: break;
          }
        }
      });
  McOutage out;
  out.window_radius = radius;
  out.bc = McEstimate::from_counts(counts.bc, sim.trials, sim.seed);
  out.mac = McEstimate::from_counts(counts.mac, sim.trials, sim.seed);
  out.total = McEstimate::from_counts(counts.bc + counts.mac, sim.trials, sim.seed);
  out.breakdown = OutageBreakdown::make(out.bc.p_hat, out.mac.p_hat, Method::montecarlo);
  return out;
}

}  // namespace sdfrelay::montecarlo

#endif  // SDFRELAY_MONTECARLO_HPP
