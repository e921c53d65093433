#pragma once
#ifndef SDFRELAY_CLI_HPP
#define SDFRELAY_CLI_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sdfrelay/analytic.hpp"
#include "sdfrelay/bounds.hpp"
#include "sdfrelay/diversity.hpp"
#include "sdfrelay/geometry.hpp"
#include "sdfrelay/montecarlo.hpp"
#include "sdfrelay/optimizer.hpp"

namespace sdfrelay::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Shortest decimal string that round-trips to the same double.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Point2 parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("expected a point as x,y but got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string xs = text.substr(0, comma), ys = text.substr(comma + 1);
    const double x = std::stod(xs, &used);
    if (used != xs.size()) throw std::invalid_argument("x");
    const double y = std::stod(ys, &used);
    if (used != ys.size()) throw std::invalid_argument("y");
    return {x, y};
  } catch (const std::exception&) {
    throw UsageError("expected a point as x,y but got '" + text + "'");
  }
}

inline double parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("not a number: '" + text + "'");
}

/// "lo:hi:Nlog" (log-spaced, descending), "lo:hi:Nlin" (linear, ascending),
/// or a comma-separated list kept in the given order.
inline std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
    if (out.empty()) throw UsageError("empty grid '" + text + "'");
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid must look like lo:hi:Nlog or lo:hi:Nlin, got '" + text + "'");
  const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
  std::string count = parts[2];
  bool log_spaced = true;
  if (count.ends_with("log")) {
    count.resize(count.size() - 3);
  } else if (count.ends_with("lin")) {
    count.resize(count.size() - 3);
    log_spaced = false;
  }
  const double nd = parse_number(count);
  if (nd < 1 || nd != std::floor(nd)) throw UsageError("grid point count must be a positive integer");
  const auto n = static_cast<std::size_t>(nd);
  if (n == 1) {
    if (lo != hi) throw UsageError("a 1-point grid needs lo == hi");
    return {lo};
  }
  if (!(hi > lo)) throw UsageError("grid needs lo < hi");
  if (log_spaced) {
    if (!(lo > 0.0)) throw UsageError("log grid needs lo > 0");
    return diversity::log_grid(lo, hi, n);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

/// Fully resolved experiment settings; flags override values from --config.
struct ExperimentConfig {
  std::string command;
  Point2 xs{15.0, 0.0};
  std::optional<Point2> xr;
  double alpha = 4.0;
  std::optional<std::string> alpha_grid;
  double beta = 0.1;
  std::optional<double> lambda;
  std::optional<std::string> lambda_grid;
  std::string fading = "rayleigh";
  std::optional<std::string> source;
  std::optional<std::string> phase;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double window_radius = 0.0;
  unsigned threads = 0;
  double rel_tol = 1e-8;
  std::optional<std::string> out;

  /// Everything that can change an emitted number; threads and out are excluded.
  nlohmann::ordered_json resolved() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["xs"] = {xs.x, xs.y};
    if (xr) j["xr"] = {xr->x, xr->y};
    j["alpha"] = alpha;
    if (alpha_grid) j["alpha-grid"] = *alpha_grid;
    j["beta"] = beta;
    if (lambda) j["lambda"] = *lambda;
    if (lambda_grid) j["lambda-grid"] = *lambda_grid;
    j["fading"] = fading;
    if (source) j["source"] = *source;
    if (phase) j["phase"] = *phase;
    j["trials"] = trials;
    j["seed"] = seed;
    j["window-radius"] = window_radius;
    j["rel-tol"] = rel_tol;
    return j;
  }

  Point2 relay() const {
    if (!xr) throw UsageError("--xr is required for '" + command + "'");
    return *xr;
  }

  geometry::NetworkConfig network(double lam) const {
    return {geometry::NodeLayout(xs, relay()), geometry::PathLossParams(alpha), beta, lam};
  }

  FadingSpec fading_spec() const {
    try {
      return parse_fading(fading);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }

  std::vector<double> lambdas(const std::vector<double>& fallback = {}) const {
    if (lambda && lambda_grid) throw UsageError("give either --lambda or --lambda-grid, not both");
    if (lambda) return {*lambda};
    if (lambda_grid) return parse_grid(*lambda_grid);
    if (!fallback.empty()) return fallback;
    throw UsageError("--lambda or --lambda-grid is required for '" + command + "'");
  }

  quadrature::QuadratureSettings quadrature() const {
    quadrature::QuadratureSettings s;
    s.rel_tol = rel_tol;
    return s;
  }

  montecarlo::SimulationParams simulation() const {
    if (trials == 0) throw UsageError("--trials must be at least 1");
    montecarlo::SimulationParams p;
    p.trials = trials;
    p.seed = seed;
    p.window_radius = window_radius;
    p.threads = threads;
    return p;
  }
};

/// Applies a JSON document whose keys mirror the long flag names.
inline void apply_json(ExperimentConfig& c, const nlohmann::json& j) {
  const auto point = [](const nlohmann::json& v) {
    if (v.is_string()) return parse_point(v.get<std::string>());
    if (v.is_array() && v.size() == 2) return Point2{v[0].get<double>(), v[1].get<double>()};
    throw UsageError("points in the config file must be [x, y] or \"x,y\"");
  };
  const auto grid = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + fmt(x.get<double>());
      return s;
    }
    throw UsageError("grids in the config file must be a string or an array");
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "xs") c.xs = point(v);
      else if (key == "xr") c.xr = point(v);
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "alpha-grid") c.alpha_grid = grid(v);
      else if (key == "beta") c.beta = v.get<double>();
      else if (key == "lambda") c.lambda = v.get<double>();
      else if (key == "lambda-grid") c.lambda_grid = grid(v);
      else if (key == "fading") c.fading = v.get<std::string>();
      else if (key == "source") c.source = v.get<std::string>();
      else if (key == "phase") c.phase = v.get<std::string>();
      else if (key == "trials") c.trials = v.get<std::uint64_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "window-radius") c.window_radius = v.get<double>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "rel-tol") c.rel_tol = v.get<double>();
      else if (key == "out") c.out = v.get<std::string>();
      else throw UsageError("unknown key '" + key + "' in config file");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config file value: ") + e.what());
  }
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const ExperimentConfig& cfg, const std::vector<std::string>& header) : os_(os) {
    os_ << "# sdfrelay " << cfg.command << " config=" << cfg.resolved().dump() << '\n';
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline void require_fading(const ExperimentConfig& c, const FadingSpec& want, const std::string& what) {
  if (!(c.fading_spec() == want))
    throw UsageError("'" + c.command + "' " + what + " requires --fading " + std::string(to_string(want)));
}

inline void cmd_analytic(const ExperimentConfig& c, std::ostream& os) {
  require_fading(c, FadingSpec::rayleigh(), "(closed-form outage)");
  const auto lambdas = c.lambdas();
  const auto integrals = analytic::outage_integrals(c.network(0.0), c.quadrature());
  CsvWriter csv(os, c, {"lambda", "q_bc", "q_mac", "q"});
  for (double l : lambdas) {
    if (l < 0.0) throw UsageError("lambda must be non-negative");
    const auto o = integrals.at(l);
    csv.row({fmt(l), fmt(o.q_bc), fmt(o.q_mac), fmt(o.q)});
  }
}

inline void cmd_simulate(const ExperimentConfig& c, std::ostream& os) {
  const auto lambdas = c.lambdas();
  const auto sim = c.simulation();
  const auto fading = c.fading_spec();
  c.network(0.0);
  CsvWriter csv(os, c, {"lambda", "q_bc_hat", "se_bc", "q_mac_hat", "se_mac", "trials", "seed"});
  for (double l : lambdas) {
    if (l < 0.0) throw UsageError("lambda must be non-negative");
    const auto m = montecarlo::estimate_outage(c.network(l), fading, sim);
    csv.row({fmt(l), fmt(m.bc.p_hat), fmt(m.bc.se), fmt(m.mac.p_hat), fmt(m.mac.se), std::to_string(sim.trials),
             std::to_string(sim.seed)});
  }
}

inline void cmd_scdo(const ExperimentConfig& c, std::ostream& os) {
  const auto fading = c.fading_spec();
  const std::string source = c.source.value_or(fading == FadingSpec::rayleigh() ? "analytic" : "bound");
  const std::string phase = c.phase.value_or(fading == FadingSpec::rayleigh() ? "total" : "bc");
  if (phase != "total" && phase != "bc") throw UsageError("--phase must be total or bc");
  const auto base = c.network(0.0);
  std::function<double(double)> q;
  Method method = Method::analytic;
  std::vector<double> default_grid = diversity::default_analytic_grid();

  if (source == "analytic") {
    require_fading(c, FadingSpec::rayleigh(), "--source analytic");
    auto integrals = analytic::outage_integrals(base, c.quadrature());
    q = [integrals, phase](double l) {
      const auto o = integrals.at(l);
      return phase == "bc" ? o.q_bc : o.q;
    };
  } else if (source == "bound") {
    if (phase != "bc") throw UsageError("--source bound covers the broadcast phase only (--phase bc)");
    method = Method::bound;
    if (fading == FadingSpec::mixed_u1()) {
      const double rate =
          bounds::jointly_dominant_rate(base, bounds::DominantSetSpec<>::for_beta(base.beta), c.quadrature());
      q = [rate](double l) { return -std::expm1(-l * rate); };
    } else if (fading == FadingSpec::pathloss_only()) {
      const auto regions = geometry::dominant_regions(base.layout, base.path_loss, base.beta);
      q = [regions](double l) { return bounds::q_bc_dominant_pathloss_only(regions, l); };
    } else {
      throw UsageError("--source bound needs --fading mixed-u1 or pathloss-only");
    }
  } else if (source == "montecarlo") {
    method = Method::montecarlo;
    default_grid = diversity::default_montecarlo_grid();
    const auto sim = c.simulation();
    q = [&, sim, fading, phase](double l) {
      const auto m = montecarlo::estimate_outage(base.with_lambda(l), fading, sim);
      return phase == "bc" ? m.bc.p_hat : m.total.p_hat;
    };
  } else {
    throw UsageError("--source must be analytic, bound or montecarlo");
  }

  diversity::SlopeFit fit;
  try {
    fit = diversity::estimate_scdo(q, c.lambdas(default_grid), method);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  CsvWriter csv(os, c, {"delta_hat", "residual", "source"});
  csv.row({fmt(fit.delta_hat), fmt(fit.residual), std::string(to_string(fit.source))});
}

inline void cmd_regions(const ExperimentConfig& c, std::ostream& os) {
  const auto cfg = c.network(0.0);
  const auto g = geometry::dominant_regions(cfg.layout, cfg.path_loss, cfg.beta);
  CsvWriter csv(os, c, {"r1", "r2", "area_r", "area_d", "area_lens", "lens_fraction_of_union", "overlap"});
  csv.row({fmt(g.r1), fmt(g.r2), fmt(g.area_r), fmt(g.area_d), fmt(g.area_lens), fmt(g.lens_fraction_of_union()),
           g.overlap ? "true" : "false"});
}

inline void cmd_optimize(const ExperimentConfig& c, std::ostream& os, std::ostream& err) {
  const std::vector<double> alphas = c.alpha_grid ? parse_grid(*c.alpha_grid) : std::vector<double>{c.alpha};
  for (double a : alphas)
    if (!(a > 2.0)) throw UsageError("path-loss exponent must satisfy alpha > 2, got " + fmt(a));
  const double lambda = c.lambda.value_or(1e-3);
  if (!(lambda > 0.0)) throw UsageError("optimize needs lambda > 0");
  if (!(c.beta > 0.0)) throw UsageError("beta must be positive");
  const double d = c.xs.norm();
  if (!(d > 0.0)) throw UsageError("source must not sit at the destination");
  optimizer::OptimizerSettings s;
  s.quadrature = c.quadrature();
  s.threads = c.threads;
  const auto curve = optimizer::sweep_alpha_curve(alphas, c.beta, lambda, d, s);
  CsvWriter csv(os, c, {"alpha", "optimal_ratio", "optimal_q"});
  for (const auto& p : curve) {
    if (p.result) {
      csv.row({fmt(p.alpha), fmt(p.result->optimal_ratio), fmt(p.result->optimal_q)});
      if (p.result->flat_objective) err << "warning: flat objective at alpha=" << fmt(p.alpha) << '\n';
    } else {
      err << "alpha=" << fmt(p.alpha) << ": " << p.error << '\n';
      csv.row({fmt(p.alpha), "nan", "nan"});
    }
  }
}

inline void cmd_bound(const ExperimentConfig& c, std::ostream& os) {
  const auto fading = c.fading_spec();
  const auto lambdas = c.lambdas();
  const auto base = c.network(0.0);
  CsvWriter csv(os, c, {"lambda", "bound", "scaling_order", "coefficient"});
  if (fading == FadingSpec::mixed_u1()) {
    const double rate =
        bounds::jointly_dominant_rate(base, bounds::DominantSetSpec<>::for_beta(base.beta), c.quadrature());
    for (double l : lambdas) csv.row({fmt(l), fmt(-std::expm1(-l * rate)), "1", fmt(rate)});
  } else if (fading == FadingSpec::pathloss_only()) {
    const auto asym = bounds::q_bc_asymptotic_pathloss_only(base);
    for (double l : lambdas)
      csv.row({fmt(l), fmt(bounds::q_bc_dominant_pathloss_only(asym.regions, l)), std::to_string(asym.order),
               fmt(asym.coefficient)});
  } else {
    throw UsageError("'bound' needs --fading mixed-u1 or pathloss-only");
  }
}

inline void cmd_tightness(const ExperimentConfig& c, std::ostream& os) {
  require_fading(c, FadingSpec::pathloss_only(), "(dominant-interferer tightness)");
  const auto lambdas = c.lambdas({1e-2, 3e-3, 1e-3, 3e-4});
  for (double l : lambdas)
    if (!(l > 0.0)) throw UsageError("tightness needs lambda > 0 (ratio undefined at 0)");
  const auto rows = bounds::tightness_diagnostic(c.network(0.0), lambdas, c.simulation());
  CsvWriter csv(os, c, {"lambda", "bound", "mc_estimate", "se", "ratio"});
  for (const auto& r : rows) csv.row({fmt(r.lambda), fmt(r.bound), fmt(r.mc.p_hat), fmt(r.mc.se), fmt(r.ratio)});
}

inline void dispatch(const ExperimentConfig& c, std::ostream& os, std::ostream& err) {
  if (c.command == "analytic") cmd_analytic(c, os);
  else if (c.command == "simulate") cmd_simulate(c, os);
  else if (c.command == "scdo") cmd_scdo(c, os);
  else if (c.command == "regions") cmd_regions(c, os);
  else if (c.command == "optimize") cmd_optimize(c, os, err);
  else if (c.command == "bound") cmd_bound(c, os);
  else if (c.command == "tightness") cmd_tightness(c, os);
  else throw UsageError("unknown command '" + c.command + "'");
}

/// Parses argv, runs one command and maps failures to exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Outage and diversity analysis of selection decode-and-forward relaying in a Poisson field"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string xs, xr, lambda, lambda_grid, alpha_grid, fading, source, phase, out_path, config_path;
  double alpha = 0, beta = 0, window = 0, rel_tol = 0;
  std::uint64_t trials = 0, seed = 0;
  unsigned threads = 0;

  auto* o_alpha = app.add_option("--alpha", alpha, "path-loss exponent, > 2 (default 4)");
  auto* o_alpha_grid = app.add_option("--alpha-grid", alpha_grid, "optimize: exponent grid lo:hi:Nlin or list");
  auto* o_beta = app.add_option("--beta", beta, "SIR threshold (default 0.1)");
  auto* o_lambda = app.add_option("--lambda", lambda, "interferer density");
  auto* o_grid = app.add_option("--lambda-grid", lambda_grid, "density grid lo:hi:Nlog or comma list");
  auto* o_xs = app.add_option("--xs", xs, "source position x,y (default 15,0)");
  auto* o_xr = app.add_option("--xr", xr, "relay position x,y");
  auto* o_fading = app.add_option("--fading", fading, "rayleigh | pathloss-only | mixed-u1 (default rayleigh)");
  auto* o_source = app.add_option("--source", source, "scdo: analytic | bound | montecarlo");
  auto* o_phase = app.add_option("--phase", phase, "scdo: total | bc");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials (default 100000)");
  auto* o_seed = app.add_option("--seed", seed, "Monte Carlo seed (default 1)");
  auto* o_window = app.add_option("--window-radius", window, "simulation disk radius, 0 = automatic");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 = all cores; never changes output");
  auto* o_tol = app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance (default 1e-8)");
  auto* o_out = app.add_option("--out", out_path, "write CSV here instead of stdout");
  auto* o_config = app.add_option("--config", config_path, "JSON file with flag values; flags override it");

  app.add_subcommand("analytic", "closed-form Rayleigh outage per lambda");
  app.add_subcommand("simulate", "Monte Carlo outage estimates per lambda");
  app.add_subcommand("scdo", "fitted diversity order over a lambda grid");
  app.add_subcommand("regions", "dominant-interferer balls and their lens");
  app.add_subcommand("optimize", "best relay position on the source-destination line per alpha");
  app.add_subcommand("bound", "lower bound on broadcast-phase outage (mixed-u1 or pathloss-only)");
  app.add_subcommand("tightness", "simulated outage over the dominant-interferer bound (pathloss-only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    ExperimentConfig c;
    c.command = app.get_subcommands().front()->get_name();
    if (o_config->count()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot read config file '" + config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file is not valid JSON: " + std::string(e.what()));
      }
      apply_json(c, j);
    }
    if (o_alpha->count()) c.alpha = alpha;
    if (o_alpha_grid->count()) c.alpha_grid = alpha_grid;
    if (o_beta->count()) c.beta = beta;
    if (o_lambda->count()) c.lambda = parse_number(lambda);
    if (o_grid->count()) c.lambda_grid = lambda_grid;
    if (o_lambda->count() && !o_grid->count()) c.lambda_grid.reset();
    if (o_grid->count() && !o_lambda->count()) c.lambda.reset();
    if (o_xs->count()) c.xs = parse_point(xs);
    if (o_xr->count()) c.xr = parse_point(xr);
    if (o_fading->count()) c.fading = fading;
    if (o_source->count()) c.source = source;
    if (o_phase->count()) c.phase = phase;
    if (o_trials->count()) c.trials = trials;
    if (o_seed->count()) c.seed = seed;
    if (o_window->count()) c.window_radius = window;
    if (o_threads->count()) c.threads = threads;
    if (o_tol->count()) c.rel_tol = rel_tol;
    if (o_out->count()) c.out = out_path;

    // Render into memory so a failing command never leaves a partial file.
    std::ostringstream buffer;
    dispatch(c, buffer, err);
    if (c.out) {
      std::ofstream f(*c.out, std::ios::binary);
      if (!f || !(f << buffer.str()) || !f.flush()) throw IoError("cannot write '" + *c.out + "'");
    } else {
      out << buffer.str();
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "UsageError: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "DomainError: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "IoError: " << e.what() << '\n';
    return kIo;
  } catch (const QuadratureError& e) {
    err << "QuadratureError: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "NumericalError: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace sdfrelay::cli

#endif  // SDFRELAY_CLI_HPP
