#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lbb/errors.hpp"
#include "lbb/model.hpp"
#include "lbb/optimize.hpp"
#include "lbb/parallel.hpp"
#include "lbb/rng.hpp"

namespace lbb {

inline constexpr double speed_of_light = 299792458.0;  // m/s

/// Anchor constellation of the TDOA localizer. The first anchor is the timing
/// reference. timing_sigma is the per-measurement timing noise in seconds.
struct AnchorSet {
  std::vector<CartesianPosition> anchors;
  double timing_sigma = 0.0;
  double propagation_speed = speed_of_light;
};

/// Anchor set parameterized by the distance-unit noise knob c*sigma_t (meters).
inline AnchorSet make_anchor_set(std::vector<CartesianPosition> anchors, double c_sigma_t_m,
                                 double propagation_speed = speed_of_light) {
  if (!(c_sigma_t_m >= 0.0)) throw std::domain_error("c*sigma_t must be non-negative");
  if (!(propagation_speed > 0.0)) throw std::domain_error("propagation speed must be positive");
  return AnchorSet{std::move(anchors), c_sigma_t_m / propagation_speed, propagation_speed};
}

inline void validate_anchor_set(const AnchorSet& set) {
  if (set.anchors.size() < 2) throw std::domain_error("anchor set needs at least two anchors");
  if (!(set.propagation_speed > 0.0))
    throw std::domain_error("propagation speed must be positive");
  if (!(set.timing_sigma >= 0.0)) throw std::domain_error("timing sigma must be non-negative");
  for (std::size_t i = 0; i < set.anchors.size(); ++i)
    for (std::size_t j = i + 1; j < set.anchors.size(); ++j)
      if (set.anchors[i].x == set.anchors[j].x && set.anchors[i].y == set.anchors[j].y)
        throw std::domain_error("anchor set contains coincident anchors");
}

/// Full-quadrant bearings from `loc` to every anchor.
inline std::vector<double> anchor_bearings(const AnchorSet& set, const CartesianPosition& loc) {
  std::vector<double> bearings;
  bearings.reserve(set.anchors.size());
  for (std::size_t n = 0; n < set.anchors.size(); ++n) {
    const double dx = set.anchors[n].x - loc.x;
    const double dy = set.anchors[n].y - loc.y;
    if (dx == 0.0 && dy == 0.0) {
      std::ostringstream msg;
      msg << "anchor " << n << " coincides with the evaluated location";
      throw std::domain_error(msg.str());
    }
    bearings.push_back(std::atan2(dy, dx));
  }
  return bearings;
}

/// Negative log-density of one time-difference measurement:
/// (phi_n - (d_n - d_1)/c)^2 / (4 c^2 sigma_t^2).
inline double tdoa_neg_log_likelihood(double phi_n, double d_n, double d_1, double c,
                                      double sigma_t) {
  if (!(c > 0.0) || !(sigma_t > 0.0))
    throw std::domain_error("tdoa_neg_log_likelihood: c and sigma_t must be positive");
  const double residual = phi_n - (d_n - d_1) / c;
  return residual * residual / (4.0 * c * c * sigma_t * sigma_t);
}

/// Symmetric 2x2 Fisher information of the TDOA scheme, 1/m^2 entries.
struct FisherMatrix {
  double j11 = 0.0;
  double j12 = 0.0;
  double j22 = 0.0;
};

/// J11 = sum_{n>=2} (cos t_n - cos t_1)^2 / (2 c^2 sigma_t^2), J22 with sines,
/// J12 with the cross terms. Depends on the anchor bearings only.
inline FisherMatrix tdoa_fisher(const AnchorSet& set, const CartesianPosition& true_loc) {
  validate_anchor_set(set);
  if (!(set.timing_sigma > 0.0))
    throw std::domain_error("tdoa_fisher: timing sigma must be positive");
  const std::vector<double> bearings = anchor_bearings(set, true_loc);
  const double c0 = std::cos(bearings[0]);
  const double s0 = std::sin(bearings[0]);
  FisherMatrix j;
  for (std::size_t n = 1; n < bearings.size(); ++n) {
    const double dc = std::cos(bearings[n]) - c0;
    const double ds = std::sin(bearings[n]) - s0;
    j.j11 += dc * dc;
    j.j22 += ds * ds;
    j.j12 += ds * dc;
  }
  const double scale =
      1.0 / (2.0 * set.propagation_speed * set.propagation_speed * set.timing_sigma *
             set.timing_sigma);
  j.j11 *= scale;
  j.j22 *= scale;
  j.j12 *= scale;
  return j;
}

/// Location-error model: per-axis standard deviations and their correlation.
struct LocationCovariance {
  double sigma_x = 0.0;  // meters
  double sigma_y = 0.0;  // meters
  double rho = 0.0;      // in (-1, 1)
};

inline LocationCovariance zero_covariance() { return LocationCovariance{0.0, 0.0, 0.0}; }

/// V = J^-1. Throws DegenerateAnchors when J is singular or near-singular
/// (fewer than three effective bearings).
inline LocationCovariance location_covariance(const FisherMatrix& j) {
  const double det = j.j11 * j.j22 - j.j12 * j.j12;
  const double scale2 = j.j11 * j.j11 + 2.0 * j.j12 * j.j12 + j.j22 * j.j22;
  // Rank-deficient matrices land at det ~ eps * |J|^2 after round-off, so the
  // cutoff must sit well above machine epsilon.
  if (!(det > 1e-12 * scale2)) {
    std::ostringstream msg;
    msg << "Fisher matrix is singular or ill-conditioned (det = " << det
        << "); the anchor set provides fewer than three effective bearings";
    throw DegenerateAnchors(msg.str());
  }
  const double v11 = j.j22 / det;
  const double v22 = j.j11 / det;
  const double v12 = -j.j12 / det;
  LocationCovariance cov;
  cov.sigma_x = std::sqrt(v11);
  cov.sigma_y = std::sqrt(v22);
  cov.rho = v12 / (cov.sigma_x * cov.sigma_y);
  return cov;
}

/// Bivariate Gaussian draw centered at the true location, via the 2x2
/// lower-triangular square root of the covariance.
inline CartesianPosition sample_estimated_location(const CartesianPosition& true_loc,
                                                   const LocationCovariance& cov,
                                                   SplitMix64& rng) {
  if (!(cov.sigma_x >= 0.0) || !(cov.sigma_y >= 0.0) || !(std::abs(cov.rho) < 1.0 + 1e-12))
    throw std::domain_error("sample_estimated_location: invalid covariance");
  const auto [z1, z2] = normal_pair(rng);
  const double rho = std::clamp(cov.rho, -1.0, 1.0);
  const double x = true_loc.x + cov.sigma_x * z1;
  const double y = true_loc.y + cov.sigma_y * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
  return CartesianPosition{x, y};
}

/// Options for the uncertainty-averaged outage sweep.
struct UncertaintyOptions {
  bool redraw_main_channel = true;          // fresh h per (location, draw) pair
  bool evaluate_at_true_location = false;   // diagnostic mode: estimate-built
                                            // beamformer scored against the true
                                            // location's statistics
  std::optional<MainChannel> fixed_main_channel;  // overrides all h draws
  int workers = 1;
};

/// Location-uncertainty-averaged outage versus tau.
///
/// Per sample: (1) draw an estimated location from the Gaussian defined by the
/// anchor geometry, (2) convert it to range/bearing from the transmitter,
/// (3) rebuild the steering vector and beamformer family there, rescale the
/// eavesdropper mean SNR through the path-loss law, evaluate the analytic
/// outage for every tau, (4) average over locations and main-channel draws.
/// Deterministic for a fixed seed and any worker count.
inline TauCurve averaged_outage_curve(const Scenario& sc, const AnchorSet& anchors,
                                      const CartesianPosition& true_eve, int grid_size,
                                      long n_location_samples, long n_channel_realizations,
                                      RngSpec rng, const UncertaintyOptions& opts = {}) {
  validate_scenario(sc);
  if (!sc.geometry)
    throw std::domain_error(
        "averaged_outage_curve: scenario must carry link-budget geometry so the "
        "eavesdropper SNR can follow the estimated distance");
  if (n_location_samples < 1 || n_channel_realizations < 1)
    throw std::domain_error("averaged_outage_curve: sample counts must be positive");

  const LocationCovariance cov = anchors.timing_sigma > 0.0
                                     ? location_covariance(tdoa_fisher(anchors, true_eve))
                                     : zero_covariance();
  const std::vector<double> taus = tau_grid(grid_size);
  const LinkBudget& budget = sc.geometry->budget;
  const SteeringVector g_true = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const double snr_eve_true = sc.mean_snr_eve;

  const RngSpec loc_stream = derived_stream(rng, streams::location);
  const RngSpec chan_stream = derived_stream(rng, streams::main_channel);

  const long n_pairs = n_location_samples * n_channel_realizations;
  constexpr long block = 1024;
  const long n_blocks = block_count(n_pairs, block);
  std::vector<std::vector<double>> sums(n_blocks), sq_sums(n_blocks);
  std::vector<long> used(n_blocks, 0), degenerate(n_blocks, 0), resampled(n_blocks, 0);

  for_blocks(n_pairs, block, opts.workers, [&](long bi, long first, long last) {
    auto& sum = sums[bi];
    auto& sq = sq_sums[bi];
    sum.assign(taus.size(), 0.0);
    sq.assign(taus.size(), 0.0);
    for (long p = first; p < last; ++p) {
      const long loc_index = p / n_channel_realizations;
      const long chan_index = p;

      // Estimated location for this sample; draws at the transmitter are
      // resampled (deterministically, same engine) and counted once per
      // location index.
      SplitMix64 loc_eng = item_engine(loc_stream, static_cast<std::uint64_t>(loc_index));
      CartesianPosition est = true_eve;
      int attempts = 0;
      for (;;) {
        est = sample_estimated_location(true_eve, cov, loc_eng);
        if (std::hypot(est.x, est.y) > 1e-9) break;
        if (p % n_channel_realizations == 0) ++resampled[bi];
        if (++attempts > 100)
          throw DegenerateAnchors("estimated locations keep landing on the transmitter");
      }
      const PolarPosition est_polar = cartesian_to_polar(est);
      const SteeringVector g_hat =
          alice_steering(est_polar.angle, sc.n_alice, sc.spacing_alice);
      const double snr_eve_hat =
          mean_snr_from_geometry(budget, est_polar.distance, Receiver::eve);

      MainChannel ch;
      if (opts.fixed_main_channel) {
        ch = *opts.fixed_main_channel;
      } else {
        const std::uint64_t item = opts.redraw_main_channel
                                       ? static_cast<std::uint64_t>(chan_index)
                                       : static_cast<std::uint64_t>(p % n_channel_realizations);
        SplitMix64 ch_eng = item_engine(chan_stream, item);
        ch = sample_main_channel(sc, ch_eng);
      }

      BeamformerFamily fam;
      try {
        fam = build_family(ch, g_hat);
      } catch (const DegenerateGeometry&) {
        ++degenerate[bi];
        continue;
      }
      ++used[bi];

      const double snr_eve_eval = opts.evaluate_at_true_location ? snr_eve_true : snr_eve_hat;
      // LOS gain toward the evaluation steering vector along the family.
      const Complex u = (g_true.entries * fam.w_zf).value();
      const Complex v = (g_true.entries * fam.w_zf_perp).value();
      const double leak_hat = std::norm((g_hat.entries * fam.w_zf_perp).value());
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const double tau = taus[i];
        const double st = std::sqrt(tau), sp = std::sqrt(1.0 - tau);
        const double hw = st * fam.a + sp * fam.b;
        const double gamma_bob = sc.mean_snr_bob * hw * hw;
        const double gain = opts.evaluate_at_true_location ? std::norm(st * u + sp * v)
                                                           : (1.0 - tau) * leak_hat;
        const EffectiveEveStats stats =
            effective_eve_stats_from_gain(gain, sc.k_eve, snr_eve_eval, sc.n_eve);
        const double p_out = outage_probability({gamma_bob, sc.secrecy_rate}, stats);
        sum[i] += p_out;
        sq[i] += p_out * p_out;
      }
    }
  });

  long n_used = 0, n_degenerate = 0, n_resampled = 0;
  std::vector<double> total(taus.size(), 0.0), total_sq(taus.size(), 0.0);
  for (long bi = 0; bi < n_blocks; ++bi) {
    n_used += used[bi];
    n_degenerate += degenerate[bi];
    n_resampled += resampled[bi];
    for (std::size_t i = 0; i < taus.size(); ++i) {
      total[i] += sums[bi][i];
      total_sq[i] += sq_sums[bi][i];
    }
  }
  if (n_resampled * 1000 > n_location_samples) {
    std::ostringstream msg;
    msg << "averaged_outage_curve: " << n_resampled << " of " << n_location_samples
        << " location samples landed on the transmitter (> 0.1%)";
    throw DegenerateAnchors(msg.str());
  }
  if (n_degenerate * 100 > n_pairs) {
    std::ostringstream msg;
    msg << "averaged_outage_curve: " << n_degenerate << " of " << n_pairs
        << " draws were degenerate (> 1%)";
    throw DegenerateGeometry(msg.str());
  }
  if (n_used == 0) throw DegenerateGeometry("averaged_outage_curve: no usable draws");

  TauCurve curve;
  curve.taus = taus;
  curve.outage.resize(taus.size());
  curve.std_error.resize(taus.size());
  std::size_t best = 0;
  const double n = static_cast<double>(n_used);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double mean = total[i] / n;
    curve.outage[i] = mean;
    double var = 0.0;
    if (n_used > 1) var = std::max(0.0, (total_sq[i] - n * mean * mean) / (n - 1.0));
    curve.std_error[i] = std::sqrt(var / n);
    if (curve.outage[i] < curve.outage[best]) best = i;
  }
  curve.argmin_tau = curve.taus[best];
  curve.min_outage = curve.outage[best];
  return curve;
}

}  // namespace lbb
