#include <catch2/catch.hpp>

#include <cmath>
#include <cstring>

#include "lbb/montecarlo.hpp"
#include "lbb/optimize.hpp"

using namespace lbb;

namespace {

Scenario reference_scenario(int n_alice = 4) {
  Scenario sc;
  sc.n_alice = n_alice;
  sc.n_eve = 2;
  sc.k_bob = db_to_linear(10.0);
  sc.k_eve = db_to_linear(5.0);
  sc.mean_snr_bob = db_to_linear(10.0);
  sc.mean_snr_eve = db_to_linear(10.0);
  sc.bob_angle = pi / 3.0;
  sc.eve_angle = pi / 4.0;
  sc.secrecy_rate = 1.0;
  return sc;
}

struct Setup {
  Scenario sc;
  MainChannel ch;
  BeamformerFamily fam;
};

Setup make_setup(int n_alice, std::uint64_t item = 0) {
  Setup s;
  s.sc = reference_scenario(n_alice);
  SplitMix64 eng = item_engine({1, streams::antenna + std::uint64_t(n_alice)}, item);
  s.ch = sample_main_channel(s.sc, eng);
  const SteeringVector g_o = alice_steering(s.sc.eve_angle, s.sc.n_alice, s.sc.spacing_alice);
  s.fam = build_family(s.ch, g_o);
  return s;
}

}  // namespace

TEST_CASE("estimate bookkeeping", "[montecarlo]") {
  const EmpiricalEstimate e = make_bernoulli_estimate(250, 1000);
  CHECK(e.value == Approx(0.25));
  CHECK(e.std_error == Approx(std::sqrt(0.25 * 0.75 / 1000.0)).epsilon(1e-12));
  CHECK(e.n_trials == 1000);
}

TEST_CASE("non-positive threshold short-circuits to certain outage", "[montecarlo]") {
  const Setup s = make_setup(4);
  // a beamformer with tiny Bob SNR: threshold 2^-1 (1+gamma_B) - 1 < 0
  Scenario weak = s.sc;
  weak.mean_snr_bob = 0.1;
  const Eigen::VectorXcd w = combine(s.fam, 1.0);
  Scenario clamped = weak;
  clamped.secrecy_rate = 6.0;
  const EmpiricalEstimate e = empirical_outage(clamped, s.ch, w, 100, {1, 2});
  CHECK(e.value == 1.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.n_trials == 100);
}

TEST_CASE("empirical outage matches the analytic form at the exact point", "[montecarlo]") {
  // tau = 1 zeroes the effective K-factor, where the Gamma law is exact
  const Setup s = make_setup(4);
  const Eigen::VectorXcd w = combine(s.fam, 1.0);
  const double analytic = outage_for_beamformer(s.sc, s.ch, w);
  const EmpiricalEstimate e =
      empirical_outage(s.sc, s.ch, w, 1000000, {1, streams::eve_channel}, 2);
  CHECK(std::abs(e.value - analytic) <= std::max(3.0 * e.std_error, 0.015));
  CHECK(std::abs(e.value - analytic) <= 4.0 * e.std_error);
}

TEST_CASE("vanishing eavesdropper snr drives the outage to zero", "[montecarlo]") {
  const Setup s = make_setup(4);
  Scenario quiet = s.sc;
  quiet.mean_snr_eve = 1e-12;
  const Eigen::VectorXcd w = combine(s.fam, 0.5);
  REQUIRE(outage_threshold(bob_snr(s.ch, w, quiet.mean_snr_bob), quiet.secrecy_rate) > 0.0);
  const EmpiricalEstimate e = empirical_outage(quiet, s.ch, w, 200000, {1, 3});
  CHECK(e.value <= 1e-5);
}

TEST_CASE("empirical cdf basics and the exponential special case", "[montecarlo]") {
  // K_E = 0 with one Eve antenna: |g w|^2 is Exp(1), the cdf is exact
  Scenario sc = reference_scenario(4);
  sc.k_eve = 0.0;
  sc.n_eve = 1;
  const Setup base = make_setup(4);
  const Eigen::VectorXcd w = combine(base.fam, 0.3);

  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(sc.mean_snr_eve * 6.0 * i / 300.0);
  const std::vector<double> cdf = empirical_eve_cdf(sc, w, grid, 1000000, {1, 4}, 2);

  CHECK(cdf.front() == 0.0);  // gamma_E > 0 almost surely
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) CHECK(cdf[i] >= cdf[i - 1]);
    sup = std::max(sup, std::abs(cdf[i] - (1.0 - std::exp(-grid[i] / sc.mean_snr_eve))));
  }
  CHECK(sup <= 0.005);
}

TEST_CASE("empirical cdf tracks the analytic gamma form", "[montecarlo]") {
  const Setup s = make_setup(4);
  const SteeringVector g_o = alice_steering(s.sc.eve_angle, s.sc.n_alice, s.sc.spacing_alice);

  auto sup_distance = [&](double tau, std::uint64_t stream) {
    const Eigen::VectorXcd w = combine(s.fam, tau);
    const EffectiveEveStats st =
        effective_eve_stats(g_o, w, s.sc.k_eve, s.sc.mean_snr_eve, s.sc.n_eve);
    std::vector<double> grid;
    const double hi = 6.0 * st.n_eve * st.mean_snr_hat;
    for (int i = 0; i <= 300; ++i) grid.push_back(hi * i / 300.0);
    const std::vector<double> cdf = empirical_eve_cdf(s.sc, w, grid, 1000000, {1, stream}, 2);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      sup = std::max(sup, std::abs(cdf[i] - eve_snr_cdf(grid[i], st)));
    return sup;
  };

  // tau = 1 removes the LOS leakage and the Gamma law is exact: the distance
  // is pure Monte Carlo noise
  CHECK(sup_distance(1.0, 5) <= 0.004);

  // mid-sweep the law is a two-moment match of a noncentral power sum; its
  // intrinsic Kolmogorov error measures ~0.010-0.012 at these K-factors, so
  // agreement is approximation-grade
  CHECK(sup_distance(0.5, 6) <= 0.015);
}

TEST_CASE("aoa invariance of the simulated outage", "[montecarlo]") {
  const std::vector<double> phis = {0.0, pi / 4.0, pi / 2.0, pi};

  // a single Eve antenna leaves the sampled channel bit-identical
  Scenario single = reference_scenario(4);
  single.n_eve = 1;
  const Setup s4 = make_setup(4);
  const Eigen::VectorXcd w = combine(s4.fam, 0.5);
  CHECK(phi_invariance_check(single, s4.ch, w, phis, 20000, {1, 6}) == 0.0);

  // multiple antennas: matched substreams keep the difference inside noise
  const EmpiricalEstimate ref = empirical_outage(s4.sc, s4.ch, w, 200000, {1, 7}, 2);
  const double diff = phi_invariance_check(s4.sc, s4.ch, w, phis, 200000, {1, 7}, 2);
  CHECK(diff <= 3.0 * std::sqrt(2.0) * ref.std_error);
}

TEST_CASE("estimates are deterministic and worker-count invariant", "[montecarlo]") {
  const Setup s = make_setup(3);
  const Eigen::VectorXcd w = combine(s.fam, 0.4);
  const EmpiricalEstimate a = empirical_outage(s.sc, s.ch, w, 100000, {9, 1}, 1);
  const EmpiricalEstimate b = empirical_outage(s.sc, s.ch, w, 100000, {9, 1}, 4);
  CHECK(std::memcmp(&a.value, &b.value, sizeof a.value) == 0);
  CHECK(a.std_error == b.std_error);

  const EmpiricalEstimate c = empirical_outage(s.sc, s.ch, w, 100000, {9, 1}, 1);
  CHECK(a.value == c.value);

  // a different stream gives a different (but valid) estimate
  const EmpiricalEstimate d = empirical_outage(s.sc, s.ch, w, 100000, {9, 2}, 1);
  CHECK(d.value != a.value);
}

TEST_CASE("disjoint substreams behave independently", "[montecarlo]") {
  // chi-square independence on paired Bernoulli outcomes from two streams
  const Setup s = make_setup(4);
  const Eigen::VectorXcd w = combine(s.fam, 0.6);
  const double threshold =
      outage_threshold(bob_snr(s.ch, w, s.sc.mean_snr_bob), s.sc.secrecy_rate);
  REQUIRE(threshold > 0.0);

  const SteeringVector r_o = eve_array_response(s.sc.eve_aoa, s.sc.n_eve, s.sc.spacing_eve);
  const SteeringVector g_o = alice_steering(s.sc.eve_angle, s.sc.n_alice, s.sc.spacing_alice);
  const Eigen::MatrixXcd los = los_eve_matrix(r_o, g_o);
  const double w_los = std::sqrt(s.sc.k_eve / (1.0 + s.sc.k_eve));
  const double w_scatter = std::sqrt(1.0 / (1.0 + s.sc.k_eve));
  auto outcome = [&](const RngSpec& spec, long trial) {
    SplitMix64 eng = item_engine(spec, std::uint64_t(trial));
    Eigen::MatrixXcd g(s.sc.n_eve, s.sc.n_alice);
    for (int i = 0; i < s.sc.n_eve; ++i)
      for (int k = 0; k < s.sc.n_alice; ++k)
        g(i, k) = w_los * los(i, k) + w_scatter * complex_normal(eng);
    return s.sc.mean_snr_eve * (g * w).squaredNorm() > threshold;
  };

  long table[2][2] = {{0, 0}, {0, 0}};
  const long n = 10000;
  for (long t = 0; t < n; ++t) ++table[outcome({5, 100}, t)][outcome({5, 200}, t)];
  const double row0 = double(table[0][0] + table[0][1]);
  const double row1 = double(table[1][0] + table[1][1]);
  const double col0 = double(table[0][0] + table[1][0]);
  const double col1 = double(table[0][1] + table[1][1]);
  REQUIRE(row0 > 0);
  REQUIRE(row1 > 0);
  double chi2 = 0.0;
  const double expected[2][2] = {{row0 * col0 / n, row0 * col1 / n},
                                 {row1 * col0 / n, row1 * col1 / n}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double diff = double(table[i][j]) - expected[i][j];
      chi2 += diff * diff / expected[i][j];
    }
  // 1 dof; p > 0.001 corresponds to chi2 < 10.828
  CHECK(chi2 < 10.828);
}

TEST_CASE("unconditional outage estimator is deterministic and sane", "[montecarlo]") {
  const Scenario sc = reference_scenario(4);
  const EmpiricalEstimate a = empirical_unconditional_outage(sc, 0.99, 100000, {2, 8}, 1);
  const EmpiricalEstimate b = empirical_unconditional_outage(sc, 0.99, 100000, {2, 8}, 4);
  CHECK(a.value == b.value);
  CHECK(a.value > 0.0);
  CHECK(a.value < 1.0);

  // it tracks the channel-averaged analytic curve at the exact tau = 1 point
  const RngSpec rng{2, 9};
  const TauCurve avg = average_curve_over_main_channel(sc, 20000, 11, rng, 2);
  const EmpiricalEstimate e = empirical_unconditional_outage(sc, 1.0, 1000000, {2, 10}, 2);
  const double se = std::sqrt(e.std_error * e.std_error +
                              avg.std_error.back() * avg.std_error.back());
  CHECK(std::abs(e.value - avg.outage.back()) <= std::max(3.0 * se, 0.015));
}
