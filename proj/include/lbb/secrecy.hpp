#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "lbb/channel.hpp"

namespace lbb {

/// Gamma function for positive real arguments.
inline double gamma_function(double z) {
  if (!(z > 0.0)) throw std::domain_error("gamma_function: argument must be positive");
  return std::tgamma(z);
}

namespace detail {

inline double clamp_probability(double p) {
  if (p < 0.0) return p > -1e-15 ? 0.0 : p;  // round-off only; leave real negatives visible
  return p > 1.0 ? 1.0 : p;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series expansion for x < a + 1, continued fraction otherwise; both with
/// 1e-14 term tolerance and a 10^4 iteration cap.
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_p: shape must be positive");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: argument must be non-negative");
  if (x == 0.0) return 0.0;
  constexpr int max_iters = 10000;
  constexpr double term_tol = 1e-14;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < max_iters; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * term_tol)
        return detail::clamp_probability(sum * std::exp(log_prefactor));
    }
    throw std::runtime_error("regularized_gamma_p: series did not converge");
  }
  // Modified Lentz continued fraction for Q(a, x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int i = 1; i < max_iters; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < term_tol)
      return detail::clamp_probability(1.0 - std::exp(log_prefactor) * f);
  }
  throw std::runtime_error("regularized_gamma_p: continued fraction did not converge");
}

/// Unregularized lower incomplete gamma.
inline double lower_incomplete_gamma(double a, double x) {
  return regularized_gamma_p(a, x) * gamma_function(a);
}

/// Effective eavesdropper statistics once a beamformer is fixed: the LOS power
/// it leaks toward Eve rescales the K-factor, the Nakagami shape and the mean
/// SNR, after which the outage is a scalar formula.
struct EffectiveEveStats {
  double k_hat = 0.0;         // |g_o w|^2 * K_E
  double m_hat = 1.0;         // (k_hat+1)^2 / (2 k_hat + 1)
  double mean_snr_hat = 1.0;  // (K_E |g_o w|^2 + 1) * snr_E / (1 + K_E)
  int n_eve = 1;
};

/// Stats from a precomputed LOS power gain |g_o w|^2.
inline EffectiveEveStats effective_eve_stats_from_gain(double los_gain, double k_eve,
                                                       double mean_snr_eve, int n_eve) {
  EffectiveEveStats st;
  st.k_hat = los_gain * k_eve;
  st.m_hat = (st.k_hat + 1.0) * (st.k_hat + 1.0) / (2.0 * st.k_hat + 1.0);
  st.mean_snr_hat = (k_eve * los_gain + 1.0) * mean_snr_eve / (1.0 + k_eve);
  st.n_eve = n_eve;
  return st;
}

inline EffectiveEveStats effective_eve_stats(const SteeringVector& g_o, const Eigen::VectorXcd& w,
                                             double k_eve, double mean_snr_eve, int n_eve) {
  const double los_gain = std::norm((g_o.entries * w).value());
  return effective_eve_stats_from_gain(los_gain, k_eve, mean_snr_eve, n_eve);
}

/// CDF of Eve's post-combining SNR: Gamma with shape n_eve*m_hat and rate
/// m_hat/mean_snr_hat.
inline double eve_snr_cdf(double gamma, const EffectiveEveStats& st) {
  if (gamma < 0.0) throw std::domain_error("eve_snr_cdf: SNR must be non-negative");
  if (gamma == 0.0) return 0.0;
  return regularized_gamma_p(st.n_eve * st.m_hat, st.m_hat * gamma / st.mean_snr_hat);
}

/// Matching Gamma density.
inline double eve_snr_pdf(double gamma, const EffectiveEveStats& st) {
  if (gamma < 0.0) throw std::domain_error("eve_snr_pdf: SNR must be non-negative");
  const double shape = st.n_eve * st.m_hat;
  const double rate = st.m_hat / st.mean_snr_hat;
  if (gamma == 0.0) return shape > 1.0 ? 0.0 : rate;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(gamma) - rate * gamma -
                  std::lgamma(shape));
}

/// Achievable secrecy rate max(0, log2(1+snr_bob) - log2(1+snr_eve)).
inline double secrecy_rate(double gamma_bob, double gamma_eve) {
  if (gamma_bob < 0.0 || gamma_eve < 0.0)
    throw std::domain_error("secrecy_rate: SNRs must be non-negative");
  const double cs = std::log2((1.0 + gamma_bob) / (1.0 + gamma_eve));
  return cs > 0.0 ? cs : 0.0;
}

struct OutageQuery {
  double gamma_bob = 0.0;     // instantaneous SNR at Bob, conditioned on
  double secrecy_rate = 0.0;  // target rate R_S, bits/s/Hz
};

/// Eve-SNR threshold below which the secrecy rate target is met.
inline double outage_threshold(double gamma_bob, double rate) {
  return std::exp2(-rate) * (1.0 + gamma_bob) - 1.0;
}

/// Secrecy outage probability conditioned on gamma_bob. A non-positive
/// threshold means Bob's capacity is already below the target, so the outage
/// is certain and the probability is exactly 1.
inline double outage_probability(const OutageQuery& q, const EffectiveEveStats& st) {
  if (q.gamma_bob < 0.0 || q.secrecy_rate < 0.0)
    throw std::domain_error("outage_probability: query fields must be non-negative");
  const double t = outage_threshold(q.gamma_bob, q.secrecy_rate);
  if (t <= 0.0) return 1.0;
  return detail::clamp_probability(1.0 - eve_snr_cdf(t, st));
}

}  // namespace lbb
