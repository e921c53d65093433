#pragma once
#ifndef SDFRELAY_TYPES_HPP
#define SDFRELAY_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdfrelay {

/// Raised when an argument falls outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Raised when adaptive quadrature cannot reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, double achieved_error)
      : std::runtime_error(msg + " (achieved error estimate " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(Point2 a, Point2 b) noexcept = default;

  double norm() const noexcept { return std::hypot(x, y); }
  double norm2() const noexcept { return x * x + y * y; }

  Point2 rotated(double angle) const noexcept {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double distance(Point2 a, Point2 b) noexcept { return (a - b).norm(); }

enum class Fading { rayleigh, deterministic };

/// Fading law per link class: desired links u, interferer-to-relay marks g,
/// interferer-to-destination marks h.
struct FadingSpec {
  Fading desired = Fading::rayleigh;
  Fading mark_g = Fading::rayleigh;
  Fading mark_h = Fading::rayleigh;

  static constexpr FadingSpec rayleigh() { return {}; }
  static constexpr FadingSpec pathloss_only() {
    return {Fading::deterministic, Fading::deterministic, Fading::deterministic};
  }
  /// Non-fading desired links with Rayleigh interference marks.
  static constexpr FadingSpec mixed_u1() {
    return {Fading::deterministic, Fading::rayleigh, Fading::rayleigh};
  }

  bool all_rayleigh() const noexcept {
    return desired == Fading::rayleigh && mark_g == Fading::rayleigh && mark_h == Fading::rayleigh;
  }
  bool all_deterministic() const noexcept {
    return desired == Fading::deterministic && mark_g == Fading::deterministic &&
           mark_h == Fading::deterministic;
  }

  friend bool operator==(const FadingSpec&, const FadingSpec&) = default;
};

inline std::string_view to_string(const FadingSpec& f) {
  if (f == FadingSpec::rayleigh()) return "rayleigh";
  if (f == FadingSpec::pathloss_only()) return "pathloss-only";
  if (f == FadingSpec::mixed_u1()) return "mixed-u1";
  return "custom";
}

inline FadingSpec parse_fading(std::string_view name) {
  if (name == "rayleigh") return FadingSpec::rayleigh();
  if (name == "pathloss-only") return FadingSpec::pathloss_only();
  if (name == "mixed-u1") return FadingSpec::mixed_u1();
  throw DomainError("unknown fading model '" + std::string(name) + "'");
}

enum class Method { analytic, bound, montecarlo };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::bound: return "bound";
    case Method::montecarlo: return "montecarlo";
  }
  return "?";
}

/// Outage probability split into the broadcast and MAC slots; q = q_bc + q_mac.
struct OutageBreakdown {
  double q_bc = 0.0;
  double q_mac = 0.0;
  double q = 0.0;
  Method method = Method::analytic;

  static OutageBreakdown make(double q_bc, double q_mac, Method m) { return {q_bc, q_mac, q_bc + q_mac, m}; }
};

inline void require(bool condition, const std::string& msg) {
  if (!condition) throw DomainError(msg);
}

}  // namespace sdfrelay

#endif  // SDFRELAY_TYPES_HPP
