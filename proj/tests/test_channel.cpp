#include <catch2/catch.hpp>

#include <Eigen/SVD>
#include <cmath>
#include <complex>

#include "lbb/channel.hpp"

using namespace lbb;

namespace {

Scenario base_scenario() {
  Scenario sc;
  sc.n_alice = 4;
  sc.n_eve = 2;
  sc.k_bob = 10.0;
  sc.k_eve = 3.16228;
  return sc;
}

double max_entry_diff(const Eigen::RowVectorXcd& a, const Eigen::RowVectorXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("alice steering reference entries", "[channel]") {
  // broadside: all phases vanish
  const SteeringVector broadside = alice_steering(pi / 2.0, 4, 0.5);
  for (int k = 0; k < 4; ++k) {
    CHECK(broadside.entries(k).real() == Approx(1.0).margin(1e-12));
    CHECK(broadside.entries(k).imag() == Approx(0.0).margin(1e-12));
  }

  // cos(pi/3) = 1/2 with half-wavelength spacing: quarter-turn per element
  const SteeringVector quarter = alice_steering(pi / 3.0, 2, 0.5);
  CHECK(quarter.entries(0) == Complex(1.0, 0.0));
  CHECK(quarter.entries(1).real() == Approx(0.0).margin(1e-12));
  CHECK(quarter.entries(1).imag() == Approx(1.0).margin(1e-12));

  // endfire: alternating signs
  const SteeringVector endfire = alice_steering(0.0, 4, 0.5);
  for (int k = 0; k < 4; ++k) {
    CHECK(endfire.entries(k).real() == Approx(k % 2 == 0 ? 1.0 : -1.0).margin(1e-12));
    CHECK(endfire.entries(k).imag() == Approx(0.0).margin(1e-12));
  }

  CHECK_THROWS_AS(alice_steering(0.0, 0, 0.5), std::domain_error);
}

TEST_CASE("eve array response has the opposite exponent sign", "[channel]") {
  const SteeringVector broadside = eve_array_response(pi / 2.0, 2, 0.5);
  CHECK(broadside.entries(1).real() == Approx(1.0).margin(1e-12));

  const SteeringVector endfire = eve_array_response(0.0, 2, 0.5);
  CHECK(endfire.entries(1).real() == Approx(-1.0).margin(1e-12));
  CHECK(endfire.entries(1).imag() == Approx(0.0).margin(1e-12));

  const SteeringVector oblique = eve_array_response(pi / 3.0, 2, 0.5);
  CHECK(oblique.entries(1).real() == Approx(0.0).margin(1e-12));
  CHECK(oblique.entries(1).imag() == Approx(-1.0).margin(1e-12));

  // conjugate of the transmit-side convention at the same angle
  const SteeringVector tx = alice_steering(pi / 3.0, 2, 0.5);
  CHECK(max_entry_diff(oblique.entries, tx.entries.conjugate()) < 1e-15);
}

TEST_CASE("steering vectors are unit modulus with norm-squared n", "[channel][property]") {
  SplitMix64 rng(5150);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const double angle = uniform_unit(rng) * two_pi;
    const double spacing = 0.1 + uniform_unit(rng);
    const SteeringVector sv = alice_steering(angle, n, spacing);
    CHECK(sv.entries(0) == Complex(1.0, 0.0));
    for (int k = 0; k < n; ++k) CHECK(std::abs(sv.entries(k)) == Approx(1.0).margin(1e-12));
    CHECK(sv.entries.squaredNorm() == Approx(double(n)).margin(1e-12));
  }
}

TEST_CASE("los matrix is the outer product", "[channel]") {
  SteeringVector r1, g1;
  r1.entries.resize(1);
  r1.entries << Complex(1, 0);
  g1.entries.resize(2);
  g1.entries << Complex(1, 0), Complex(1, 0);
  const Eigen::MatrixXcd all_ones = los_eve_matrix(r1, g1);
  CHECK(all_ones.rows() == 1);
  CHECK(all_ones.cols() == 2);
  CHECK(all_ones(0, 0) == Complex(1, 0));
  CHECK(all_ones(0, 1) == Complex(1, 0));

  SteeringVector r2, g2;
  r2.entries.resize(2);
  r2.entries << Complex(1, 0), Complex(-1, 0);
  g2.entries.resize(2);
  g2.entries << Complex(1, 0), Complex(0, 1);
  const Eigen::MatrixXcd m = los_eve_matrix(r2, g2);
  CHECK(m(0, 0) == Complex(1, 0));
  CHECK(m(0, 1) == Complex(0, 1));
  CHECK(m(1, 0) == Complex(-1, 0));
  CHECK(m(1, 1) == Complex(0, -1));
}

TEST_CASE("los matrix is rank one", "[channel][property]") {
  SplitMix64 rng(808);
  for (int i = 0; i < 50; ++i) {
    const int n_e = 1 + static_cast<int>(rng() % 4);
    const int n_a = 2 + static_cast<int>(rng() % 7);
    const SteeringVector r_o = eve_array_response(uniform_unit(rng) * two_pi, n_e, 0.5);
    const SteeringVector g_o = alice_steering(uniform_unit(rng) * two_pi, n_a, 0.5);
    const Eigen::MatrixXcd m = los_eve_matrix(r_o, g_o);

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    for (int k = 1; k < sv.size(); ++k) CHECK(sv(k) < 1e-12);

    // G_o G_o^H = |g_o|^2 r_o^T (r_o^T)^H, entrywise
    const Eigen::MatrixXcd lhs = m * m.adjoint();
    const Eigen::MatrixXcd rhs =
        g_o.entries.squaredNorm() * (r_o.entries.transpose() * r_o.entries.conjugate());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * lhs.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("main channel limits", "[channel]") {
  Scenario sc = base_scenario();

  sc.k_bob = 1e12;  // pure LOS limit
  SplitMix64 rng(1);
  const MainChannel ch_los = sample_main_channel(sc, rng);
  CHECK(max_entry_diff(ch_los.h, ch_los.los.entries) < 1e-5);

  sc.k_bob = 0.0;  // pure scatter: the LOS weight vanishes and the draw is
                   // exactly the scattered sequence of the engine
  SplitMix64 engine_a = item_engine({9, 0}, 0);
  SplitMix64 engine_b = item_engine({9, 0}, 0);
  const MainChannel ch_scatter = sample_main_channel(sc, engine_a);
  for (int k = 0; k < sc.n_alice; ++k) {
    const Complex expected = complex_normal(engine_b);
    CHECK(ch_scatter.h(k) == expected);
  }
}

TEST_CASE("main channel mean power equals the antenna count", "[channel][montecarlo]") {
  Scenario sc = base_scenario();
  sc.k_bob = 10.0;
  const long n_draws = 1000000;
  SplitMix64 rng(20240601);
  double sum = 0.0;
  for (long i = 0; i < n_draws; ++i) {
    const MainChannel ch = sample_main_channel(sc, rng);
    sum += ch.h.squaredNorm();
  }
  // every entry has unit second moment
  CHECK(sum / double(n_draws) == Approx(4.0).margin(0.01));
}

TEST_CASE("eve channel limits and mean power", "[channel][montecarlo]") {
  Scenario sc = base_scenario();

  sc.k_eve = 1e12;
  SplitMix64 rng(2);
  const EveChannel ch_los = sample_eve_channel(sc, rng);
  CHECK((ch_los.g - ch_los.los).cwiseAbs().maxCoeff() < 1e-5);

  sc.k_eve = 0.0;
  SplitMix64 engine_a = item_engine({10, 0}, 0);
  SplitMix64 engine_b = item_engine({10, 0}, 0);
  const EveChannel ch_scatter = sample_eve_channel(sc, engine_a);
  for (int i = 0; i < sc.n_eve; ++i)
    for (int k = 0; k < sc.n_alice; ++k) CHECK(ch_scatter.g(i, k) == complex_normal(engine_b));

  sc.k_eve = 3.16228;
  const long n_draws = 1000000;
  SplitMix64 mc(77);
  double sum = 0.0;
  for (long i = 0; i < n_draws; ++i) sum += sample_eve_channel(sc, mc).g.squaredNorm();
  // 8 entries, unit second moment each
  CHECK(sum / double(n_draws) == Approx(8.0).margin(0.02));
}

TEST_CASE("scattered entries have unit empirical variance", "[channel][montecarlo]") {
  Scenario sc = base_scenario();
  sc.k_bob = 0.0;
  const long n_draws = 250000;  // 4 entries per draw -> 1e6 samples
  SplitMix64 rng(31337);
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n_draws; ++i) {
    const MainChannel ch = sample_main_channel(sc, rng);
    for (int k = 0; k < sc.n_alice; ++k) {
      const double p = std::norm(ch.h(k));
      sum += p;
      sum_sq += p * p;
    }
  }
  const double n = double(n_draws * sc.n_alice);
  const double mean = sum / n;
  // |z|^2 ~ Exp(1): variance 1, standard error of the mean 1/sqrt(n)
  CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(n));
  const double var = sum_sq / n - mean * mean;
  CHECK(var == Approx(1.0).margin(0.02));
}
