#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "lbb/model.hpp"
#include "lbb/rng.hpp"

namespace lbb {

using Complex = std::complex<double>;

/// Unit-modulus array response of a uniform linear array. First entry is 1.
struct SteeringVector {
  Eigen::RowVectorXcd entries;
  int count() const { return static_cast<int>(entries.size()); }
};

/// Transmit-side response toward `angle`: entry k = exp(+j 2 pi k spacing cos(angle)).
inline SteeringVector alice_steering(double angle, int n, double spacing) {
  if (n < 1) throw std::domain_error("steering vector needs at least one antenna");
  if (!(spacing > 0.0)) throw std::domain_error("antenna spacing must be positive");
  SteeringVector sv;
  sv.entries.resize(n);
  const double phase_step = two_pi * spacing * std::cos(angle);
  for (int k = 0; k < n; ++k) sv.entries(k) = std::polar(1.0, phase_step * k);
  return sv;
}

/// Receive-side response at the eavesdropper: entry k = exp(-j 2 pi k spacing cos(aoa)).
/// Note the opposite exponent sign relative to alice_steering.
inline SteeringVector eve_array_response(double aoa, int n, double spacing) {
  if (n < 1) throw std::domain_error("steering vector needs at least one antenna");
  if (!(spacing > 0.0)) throw std::domain_error("antenna spacing must be positive");
  SteeringVector sv;
  sv.entries.resize(n);
  const double phase_step = -two_pi * spacing * std::cos(aoa);
  for (int k = 0; k < n; ++k) sv.entries(k) = std::polar(1.0, phase_step * k);
  return sv;
}

/// LOS matrix of the eavesdropper channel: the rank-1 outer product r_o^T g_o.
inline Eigen::MatrixXcd los_eve_matrix(const SteeringVector& r_o, const SteeringVector& g_o) {
  return r_o.entries.transpose() * g_o.entries;
}

/// Sampled main channel: h = sqrt(K/(1+K)) h_o + sqrt(1/(1+K)) h_r.
struct MainChannel {
  Eigen::RowVectorXcd h;
  SteeringVector los;  // h_o
  double k_bob = 0.0;
};

/// Sampled eavesdropper channel: G = sqrt(K/(1+K)) G_o + sqrt(1/(1+K)) G_r.
struct EveChannel {
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd los;  // G_o
  double k_eve = 0.0;
};

/// Draw order: h_r entries in index order, one CN(0,1) each.
inline MainChannel sample_main_channel(const Scenario& sc, SplitMix64& rng) {
  MainChannel out;
  out.los = alice_steering(sc.bob_angle, sc.n_alice, sc.spacing_alice);
  out.k_bob = sc.k_bob;
  const double w_los = std::sqrt(sc.k_bob / (1.0 + sc.k_bob));
  const double w_scatter = std::sqrt(1.0 / (1.0 + sc.k_bob));
  out.h.resize(sc.n_alice);
  for (int k = 0; k < sc.n_alice; ++k)
    out.h(k) = w_los * out.los.entries(k) + w_scatter * complex_normal(rng);
  return out;
}

/// Draw order: G_r row-major (rows are Eve antennas), one CN(0,1) per entry.
inline EveChannel sample_eve_channel(const Scenario& sc, SplitMix64& rng) {
  EveChannel out;
  const SteeringVector r_o = eve_array_response(sc.eve_aoa, sc.n_eve, sc.spacing_eve);
  const SteeringVector g_o = alice_steering(sc.eve_angle, sc.n_alice, sc.spacing_alice);
  out.los = los_eve_matrix(r_o, g_o);
  out.k_eve = sc.k_eve;
  const double w_los = std::sqrt(sc.k_eve / (1.0 + sc.k_eve));
  const double w_scatter = std::sqrt(1.0 / (1.0 + sc.k_eve));
  out.g.resize(sc.n_eve, sc.n_alice);
  for (int i = 0; i < sc.n_eve; ++i)
    for (int k = 0; k < sc.n_alice; ++k)
      out.g(i, k) = w_los * out.los(i, k) + w_scatter * complex_normal(rng);
  return out;
}

}  // namespace lbb
