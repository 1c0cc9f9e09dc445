#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lbb/beamforming.hpp"
#include "lbb/parallel.hpp"
#include "lbb/rng.hpp"
#include "lbb/secrecy.hpp"

namespace lbb {

/// A Bernoulli-tally Monte Carlo estimate.
struct EmpiricalEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_trials = 0;
};

inline EmpiricalEstimate make_bernoulli_estimate(long successes, long n_trials) {
  EmpiricalEstimate e;
  e.n_trials = n_trials;
  e.value = static_cast<double>(successes) / static_cast<double>(n_trials);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n_trials));
  return e;
}

/// Empirical secrecy outage conditioned on one main-channel draw: samples
/// fresh eavesdropper channels and tallies gamma_E > 2^-Rs (1+gamma_B) - 1
/// (strict comparison). Trial i uses the engine for item i of `rng`, so the
/// tally is independent of worker count and execution order.
inline EmpiricalEstimate empirical_outage(const Scenario& sc, const MainChannel& ch,
                                          const Eigen::VectorXcd& w, long n_trials, RngSpec rng,
                                          int workers = 1) {
  validate_scenario(sc);
  if (n_trials < 1) throw std::domain_error("empirical_outage: need at least one trial");
  if (std::abs(w.norm() - 1.0) > 1e-9)
    throw std::domain_error("empirical_outage: beamformer must be unit norm");
  const double gamma_bob = bob_snr(ch, w, sc.mean_snr_bob);
  const double threshold = outage_threshold(gamma_bob, sc.secrecy_rate);
  if (threshold <= 0.0) return EmpiricalEstimate{1.0, 0.0, n_trials};

  const SteeringVector r_o = eve_array_response(sc.eve_aoa, sc.n_eve, sc.spacing_eve);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const Eigen::MatrixXcd los = los_eve_matrix(r_o, g_o);
  const double w_los = std::sqrt(sc.k_eve / (1.0 + sc.k_eve));
  const double w_scatter = std::sqrt(1.0 / (1.0 + sc.k_eve));

  constexpr long block = 8192;
  const long n_blocks = block_count(n_trials, block);
  std::vector<long> hits(n_blocks, 0);
  for_blocks(n_trials, block, workers, [&](long bi, long first, long last) {
    Eigen::MatrixXcd g(sc.n_eve, sc.n_alice);
    long count = 0;
    for (long t = first; t < last; ++t) {
      SplitMix64 eng = item_engine(rng, static_cast<std::uint64_t>(t));
      for (int i = 0; i < sc.n_eve; ++i)
        for (int k = 0; k < sc.n_alice; ++k)
          g(i, k) = w_los * los(i, k) + w_scatter * complex_normal(eng);
      const double gamma_eve = sc.mean_snr_eve * (g * w).squaredNorm();
      if (gamma_eve > threshold) ++count;
    }
    hits[bi] = count;
  });
  long successes = 0;
  for (long h : hits) successes += h;
  return make_bernoulli_estimate(successes, n_trials);
}

/// Empirical CDF of Eve's SNR on a sorted grid of linear SNR values.
inline std::vector<double> empirical_eve_cdf(const Scenario& sc, const Eigen::VectorXcd& w,
                                             const std::vector<double>& grid, long n_trials,
                                             RngSpec rng, int workers = 1) {
  validate_scenario(sc);
  if (n_trials < 1) throw std::domain_error("empirical_eve_cdf: need at least one trial");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::domain_error("empirical_eve_cdf: grid must be sorted ascending");

  const SteeringVector r_o = eve_array_response(sc.eve_aoa, sc.n_eve, sc.spacing_eve);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const Eigen::MatrixXcd los = los_eve_matrix(r_o, g_o);
  const double w_los = std::sqrt(sc.k_eve / (1.0 + sc.k_eve));
  const double w_scatter = std::sqrt(1.0 / (1.0 + sc.k_eve));

  std::vector<double> samples(static_cast<std::size_t>(n_trials));
  for_blocks(n_trials, 8192, workers, [&](long, long first, long last) {
    Eigen::MatrixXcd g(sc.n_eve, sc.n_alice);
    for (long t = first; t < last; ++t) {
      SplitMix64 eng = item_engine(rng, static_cast<std::uint64_t>(t));
      for (int i = 0; i < sc.n_eve; ++i)
        for (int k = 0; k < sc.n_alice; ++k)
          g(i, k) = w_los * los(i, k) + w_scatter * complex_normal(eng);
      samples[static_cast<std::size_t>(t)] = sc.mean_snr_eve * (g * w).squaredNorm();
    }
  });
  std::sort(samples.begin(), samples.end());
  std::vector<double> cdf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(samples.begin(), samples.end(), grid[i]);
    cdf[i] = static_cast<double>(it - samples.begin()) / static_cast<double>(n_trials);
  }
  return cdf;
}

/// Reruns empirical_outage with identical scattered-part substreams but
/// different eavesdropper angles of arrival; returns the largest pairwise
/// difference between the estimates.
inline double phi_invariance_check(const Scenario& sc, const MainChannel& ch,
                                   const Eigen::VectorXcd& w, const std::vector<double>& phi_values,
                                   long n_trials, RngSpec rng, int workers = 1) {
  if (phi_values.size() < 2)
    throw std::domain_error("phi_invariance_check: need at least two aoa values");
  std::vector<double> estimates;
  estimates.reserve(phi_values.size());
  for (double phi : phi_values) {
    Scenario varied = sc;
    varied.eve_aoa = phi;
    estimates.push_back(empirical_outage(varied, ch, w, n_trials, rng, workers).value);
  }
  double max_diff = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i)
    for (std::size_t j = i + 1; j < estimates.size(); ++j)
      max_diff = std::max(max_diff, std::abs(estimates[i] - estimates[j]));
  return max_diff;
}

/// Empirical outage with both the main channel and the eavesdropper channel
/// redrawn every trial (the Monte Carlo counterpart of a channel-averaged
/// analytic curve). Degenerate family draws fall back to maximum-ratio
/// transmission so the tally stays unbiased over all draws.
inline EmpiricalEstimate empirical_unconditional_outage(const Scenario& sc, double tau,
                                                        long n_trials, RngSpec rng,
                                                        int workers = 1) {
  validate_scenario(sc);
  if (n_trials < 1) throw std::domain_error("need at least one trial");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("tau must lie in [0, 1]");

  const SteeringVector r_o = eve_array_response(sc.eve_aoa, sc.n_eve, sc.spacing_eve);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  const Eigen::MatrixXcd los = los_eve_matrix(r_o, g_o);
  const double w_los = std::sqrt(sc.k_eve / (1.0 + sc.k_eve));
  const double w_scatter = std::sqrt(1.0 / (1.0 + sc.k_eve));

  constexpr long block = 8192;
  const long n_blocks = block_count(n_trials, block);
  std::vector<long> hits(n_blocks, 0);
  for_blocks(n_trials, block, workers, [&](long bi, long first, long last) {
    Eigen::MatrixXcd g(sc.n_eve, sc.n_alice);
    long count = 0;
    for (long t = first; t < last; ++t) {
      // Draw order per trial: h entries, then G_r row-major.
      SplitMix64 eng = item_engine(rng, static_cast<std::uint64_t>(t));
      const MainChannel ch = sample_main_channel(sc, eng);
      Eigen::VectorXcd w;
      try {
        w = combine(build_family(ch, g_o), tau);
      } catch (const DegenerateGeometry&) {
        w = mrt_beamformer(ch);
      }
      const double threshold = outage_threshold(bob_snr(ch, w, sc.mean_snr_bob), sc.secrecy_rate);
      if (threshold <= 0.0) {
        ++count;
        continue;
      }
      for (int i = 0; i < sc.n_eve; ++i)
        for (int k = 0; k < sc.n_alice; ++k)
          g(i, k) = w_los * los(i, k) + w_scatter * complex_normal(eng);
      const double gamma_eve = sc.mean_snr_eve * (g * w).squaredNorm();
      if (gamma_eve > threshold) ++count;
    }
    hits[bi] = count;
  });
  long successes = 0;
  for (long h : hits) successes += h;
  return make_bernoulli_estimate(successes, n_trials);
}

}  // namespace lbb
