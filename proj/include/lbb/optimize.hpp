#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lbb/beamforming.hpp"
#include "lbb/parallel.hpp"
#include "lbb/rng.hpp"
#include "lbb/secrecy.hpp"

namespace lbb {

/// Secrecy outage sampled on a tau grid. std_error is filled only by the
/// averaging runners (one Monte Carlo standard error per grid point).
struct TauCurve {
  std::vector<double> taus;
  std::vector<double> outage;
  std::vector<double> std_error;
  double argmin_tau = 0.0;
  double min_outage = 1.0;
};

inline std::vector<double> tau_grid(int grid_size) {
  if (grid_size < 2) throw std::domain_error("tau grid needs at least two points");
  std::vector<double> taus(grid_size);
  for (int i = 0; i < grid_size; ++i)
    taus[i] = static_cast<double>(i) / static_cast<double>(grid_size - 1);
  taus.back() = 1.0;
  return taus;
}

/// Per-realization scalars that make one tau evaluation O(1):
///   |h w(tau)|^2   = (sqrt(tau) a + sqrt(1-tau) b)^2
///   |g_o w(tau)|^2 = (1 - tau) * leak,  leak = |g_o w_zf_perp|^2
struct FamilyScalars {
  double a = 0.0;
  double b = 0.0;
  double leak = 0.0;
};

inline FamilyScalars family_scalars(const BeamformerFamily& fam, const SteeringVector& g_o) {
  FamilyScalars fs;
  fs.a = fam.a;
  fs.b = fam.b;
  fs.leak = std::norm((g_o.entries * fam.w_zf_perp).value());
  return fs;
}

/// Analytic outage along the family, evaluated from precomputed scalars. Must
/// agree with the materialized-vector route within 1e-12.
inline double family_outage_at(double tau, const FamilyScalars& fs, const Scenario& sc) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("tau must lie in [0, 1]");
  const double hw = std::sqrt(tau) * fs.a + std::sqrt(1.0 - tau) * fs.b;
  const double gamma_bob = sc.mean_snr_bob * hw * hw;
  const EffectiveEveStats st =
      effective_eve_stats_from_gain((1.0 - tau) * fs.leak, sc.k_eve, sc.mean_snr_eve, sc.n_eve);
  return outage_probability({gamma_bob, sc.secrecy_rate}, st);
}

/// Analytic outage for an arbitrary unit-norm beamformer; the closed form
/// reads w only through its LOS leakage |g_o w|^2.
inline double outage_for_beamformer(const Scenario& sc, const MainChannel& ch,
                                    const Eigen::VectorXcd& w) {
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const EffectiveEveStats st = effective_eve_stats(g_o, w, sc.k_eve, sc.mean_snr_eve, sc.n_eve);
  const double gamma_bob = bob_snr(ch, w, sc.mean_snr_bob);
  return outage_probability({gamma_bob, sc.secrecy_rate}, st);
}

/// Sweeps w(tau) over a uniform grid, materializing the beamformer at every
/// point. Ties in the minimum break toward the smallest tau.
inline TauCurve sweep_tau(const Scenario& sc, const MainChannel& ch, int grid_size) {
  validate_scenario(sc);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const BeamformerFamily fam = build_family(ch, g_o);
  TauCurve curve;
  curve.taus = tau_grid(grid_size);
  curve.outage.resize(curve.taus.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.taus.size(); ++i) {
    const Eigen::VectorXcd w = combine(fam, curve.taus[i]);
    const EffectiveEveStats st = effective_eve_stats(g_o, w, sc.k_eve, sc.mean_snr_eve, sc.n_eve);
    const double gb = bob_snr(ch, w, sc.mean_snr_bob);
    curve.outage[i] = outage_probability({gb, sc.secrecy_rate}, st);
    if (curve.outage[i] < curve.outage[best]) best = i;
  }
  curve.argmin_tau = curve.taus[best];
  curve.min_outage = curve.outage[best];
  return curve;
}

namespace detail {

/// Golden-section minimization on [lo, hi]; assumes nothing beyond continuity,
/// returns the best point probed.
template <class F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, int iters) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

/// Coarse grid scan followed by golden-section refinement one cell around the
/// best grid point. Never reports a value above the grid minimum.
template <class F>
std::pair<double, double> grid_then_golden(F&& f, int coarse_grid, int refine_iters) {
  const std::vector<double> taus = tau_grid(coarse_grid);
  std::size_t best = 0;
  std::vector<double> vals(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    vals[i] = f(taus[i]);
    if (vals[i] < vals[best]) best = i;
  }
  const double cell = 1.0 / static_cast<double>(coarse_grid - 1);
  const double lo = std::max(0.0, taus[best] - cell);
  const double hi = std::min(1.0, taus[best] + cell);
  auto [tau_ref, val_ref] = golden_section(f, lo, hi, refine_iters);
  if (val_ref < vals[best]) return {tau_ref, val_ref};
  return {taus[best], vals[best]};
}

}  // namespace detail

/// Optimal tau for one main-channel draw: coarse scan plus local refinement.
inline std::pair<double, double> optimal_tau(const Scenario& sc, const MainChannel& ch,
                                             int coarse_grid, int refine_iters) {
  validate_scenario(sc);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const FamilyScalars fs = family_scalars(build_family(ch, g_o), g_o);
  return detail::grid_then_golden([&](double tau) { return family_outage_at(tau, fs, sc); },
                                  coarse_grid, refine_iters);
}

/// Brute-force check of family optimality: minimum analytic outage over
/// beamformers drawn uniformly from the complex unit sphere.
inline double random_search_oracle(const Scenario& sc, const MainChannel& ch, long n_samples,
                                   RngSpec rng) {
  validate_scenario(sc);
  if (n_samples < 1) throw std::domain_error("random_search_oracle: need at least one sample");
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const RngSpec sphere = derived_stream(rng, streams::sphere);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd w(sc.n_alice);
  for (long s = 0; s < n_samples; ++s) {
    SplitMix64 eng = item_engine(sphere, static_cast<std::uint64_t>(s));
    for (int k = 0; k < sc.n_alice; ++k) w(k) = complex_normal(eng);
    w /= w.norm();
    const EffectiveEveStats st = effective_eve_stats(g_o, w, sc.k_eve, sc.mean_snr_eve, sc.n_eve);
    const double gb = bob_snr(ch, w, sc.mean_snr_bob);
    const double sop = outage_probability({gb, sc.secrecy_rate}, st);
    if (sop < best) best = sop;
  }
  return best;
}

/// Element-wise mean of per-realization tau curves over i.i.d. main-channel
/// draws. Degenerate draws are skipped and counted (error above 1%). Results
/// are bit-identical for any worker count: realizations map to fixed blocks
/// and block partials reduce in index order.
inline TauCurve average_curve_over_main_channel(const Scenario& sc, long n_realizations,
                                                int grid_size, RngSpec rng, int workers = 1) {
  validate_scenario(sc);
  if (n_realizations < 1) throw std::domain_error("need at least one realization");
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const std::vector<double> taus = tau_grid(grid_size);
  const RngSpec h_stream = derived_stream(rng, streams::main_channel);

  constexpr long block = 1024;
  const long n_blocks = block_count(n_realizations, block);
  std::vector<std::vector<double>> sums(n_blocks), sq_sums(n_blocks);
  std::vector<long> used(n_blocks, 0), skipped(n_blocks, 0);

  for_blocks(n_realizations, block, workers, [&](long bi, long first, long last) {
    auto& sum = sums[bi];
    auto& sq = sq_sums[bi];
    sum.assign(taus.size(), 0.0);
    sq.assign(taus.size(), 0.0);
    for (long r = first; r < last; ++r) {
      SplitMix64 eng = item_engine(h_stream, static_cast<std::uint64_t>(r));
      const MainChannel ch = sample_main_channel(sc, eng);
      FamilyScalars fs;
      try {
        fs = family_scalars(build_family(ch, g_o), g_o);
      } catch (const DegenerateGeometry&) {
        ++skipped[bi];
        continue;
      }
      ++used[bi];
      for (std::size_t i = 0; i < taus.size(); ++i) {
        const double p = family_outage_at(taus[i], fs, sc);
        sum[i] += p;
        sq[i] += p * p;
      }
    }
  });

  long n_used = 0, n_skipped = 0;
  std::vector<double> total(taus.size(), 0.0), total_sq(taus.size(), 0.0);
  for (long bi = 0; bi < n_blocks; ++bi) {
    n_used += used[bi];
    n_skipped += skipped[bi];
    for (std::size_t i = 0; i < taus.size(); ++i) {
      total[i] += sums[bi][i];
      total_sq[i] += sq_sums[bi][i];
    }
  }
  if (n_skipped * 100 > n_realizations) {
    std::ostringstream msg;
    msg << "average_curve_over_main_channel: " << n_skipped << " of " << n_realizations
        << " draws were degenerate (> 1%)";
    throw DegenerateGeometry(msg.str());
  }
  if (n_used == 0) throw DegenerateGeometry("average_curve_over_main_channel: no usable draws");

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
