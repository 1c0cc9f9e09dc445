#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace lbb {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Wraps an angle into [0, 2*pi).
inline double normalize_angle(double rad) {
  double a = std::fmod(rad, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;  // fmod round-off at the seam
  return a;
}

/// Position relative to the transmitter: range in meters, bearing in radians.
struct PolarPosition {
  double distance = 0.0;  // meters, >= 0
  double angle = 0.0;     // radians, in [0, 2*pi)
};

struct CartesianPosition {
  double x = 0.0;  // meters
  double y = 0.0;  // meters
};

inline PolarPosition make_polar(double distance, double angle) {
  if (!(distance >= 0.0) || !std::isfinite(distance))
    throw std::domain_error("polar distance must be finite and non-negative");
  if (!std::isfinite(angle)) throw std::domain_error("polar angle must be finite");
  return PolarPosition{distance, normalize_angle(angle)};
}

/// Converts a decibel quantity to a linear power ratio.
inline double db_to_linear(double value_db) {
  if (!std::isfinite(value_db)) throw std::domain_error("dB value must be finite");
  return std::pow(10.0, value_db / 10.0);
}

inline double linear_to_db(double ratio) {
  if (!(ratio > 0.0)) throw std::domain_error("linear ratio must be positive");
  return 10.0 * std::log10(ratio);
}

/// Transmit power, path-loss exponent and per-receiver noise floors.
struct LinkBudget {
  double transmit_power = 1.0;       // watts
  double path_loss_exponent = 2.0;   // dimensionless
  double noise_variance_bob = 1.0;   // watts
  double noise_variance_eve = 1.0;   // watts
};

inline void validate_link_budget(const LinkBudget& b) {
  if (!(b.transmit_power > 0.0)) throw std::domain_error("transmit power must be positive");
  if (!(b.path_loss_exponent > 0.0)) throw std::domain_error("path loss exponent must be positive");
  if (!(b.noise_variance_bob > 0.0)) throw std::domain_error("Bob noise variance must be positive");
  if (!(b.noise_variance_eve > 0.0)) throw std::domain_error("Eve noise variance must be positive");
}

enum class Receiver { bob, eve };

/// Mean SNR at the selected receiver: P * d^-eta / sigma^2.
inline double mean_snr_from_geometry(const LinkBudget& budget, double distance, Receiver receiver) {
  validate_link_budget(budget);
  if (!(distance > 0.0)) throw std::domain_error("distance must be positive");
  const double noise =
      receiver == Receiver::bob ? budget.noise_variance_bob : budget.noise_variance_eve;
  return budget.transmit_power * std::pow(distance, -budget.path_loss_exponent) / noise;
}

inline CartesianPosition polar_to_cartesian(const PolarPosition& p) {
  return CartesianPosition{p.distance * std::cos(p.angle), p.distance * std::sin(p.angle)};
}

inline PolarPosition cartesian_to_polar(const CartesianPosition& c) {
  if (c.x == 0.0 && c.y == 0.0)
    throw std::domain_error("cartesian_to_polar: angle undefined at the origin");
  return PolarPosition{std::hypot(c.x, c.y), normalize_angle(std::atan2(c.y, c.x))};
}

/// Node placement and link budget for distance-derived SNRs. Positions are
/// relative to the transmitter (Alice sits at the origin).
struct Geometry {
  CartesianPosition bob;
  CartesianPosition eve;
  LinkBudget budget;
};

/// Full system parameterization. SNRs and K-factors are linear ratios; decibel
/// values are converted at the config boundary. When `geometry` is set the
/// mean SNRs and angles were resolved from it at load time.
struct Scenario {
  int n_alice = 4;              // transmit antennas, >= 2
  int n_eve = 2;                // eavesdropper antennas, >= 1
  double spacing_alice = 0.5;   // wavelengths
  double spacing_eve = 0.5;     // wavelengths
  double k_bob = 10.0;          // Rician K-factor, main channel
  double k_eve = 3.1622776601683795;  // Rician K-factor, eavesdropper channel
  double mean_snr_bob = 10.0;   // linear
  double mean_snr_eve = 10.0;   // linear
  double bob_angle = pi / 3.0;  // radians
  double eve_angle = pi / 4.0;  // radians
  double eve_aoa = 0.0;         // radians; does not enter the analytic outage
  double secrecy_rate = 1.0;    // bits/s/Hz
  std::optional<Geometry> geometry;
};

inline void validate_scenario(const Scenario& s) {
  if (s.n_alice < 2) throw std::domain_error("n_alice must be at least 2");
  if (s.n_eve < 1) throw std::domain_error("n_eve must be at least 1");
  if (!(s.spacing_alice > 0.0) || !(s.spacing_eve > 0.0))
    throw std::domain_error("antenna spacing must be positive");
  if (!(s.k_bob >= 0.0) || !(s.k_eve >= 0.0))
    throw std::domain_error("Rician K-factors must be non-negative");
  if (!(s.mean_snr_bob > 0.0) || !(s.mean_snr_eve > 0.0))
    throw std::domain_error("mean SNRs must be positive");
  if (!(s.secrecy_rate >= 0.0)) throw std::domain_error("secrecy rate must be non-negative");
  if (!std::isfinite(s.bob_angle) || !std::isfinite(s.eve_angle) || !std::isfinite(s.eve_aoa))
    throw std::domain_error("angles must be finite");
  if (s.geometry) validate_link_budget(s.geometry->budget);
}

}  // namespace lbb
