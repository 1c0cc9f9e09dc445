#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lbb/channel.hpp"
#include "lbb/errors.hpp"

namespace lbb {

/// Complementary projectors built from the eavesdropper LOS direction.
///
/// The LOS matrix G_o = r_o^T g_o has rank 1, so G_o G_o^H is singular
/// whenever Eve has more than one antenna; the pseudo-inverse collapses the
/// projector onto span{g_o^H} regardless of r_o. Both matrices are Hermitian,
/// idempotent and sum to the identity.
struct ProjectorPair {
  Eigen::MatrixXcd onto_eve_los;     // rank-1 projector onto span{g_o^H}
  Eigen::MatrixXcd onto_complement;  // I minus the above
};

inline ProjectorPair eve_los_projectors(const SteeringVector& g_o) {
  const double norm2 = g_o.entries.squaredNorm();
  if (!(norm2 > 0.0)) throw std::domain_error("eve_los_projectors: zero steering vector");
  const int n = g_o.count();
  ProjectorPair p;
  p.onto_eve_los = (g_o.entries.adjoint() * g_o.entries) / norm2;
  p.onto_complement = Eigen::MatrixXcd::Identity(n, n) - p.onto_eve_los;
  return p;
}

/// Orthonormal beamformer pair spanning the plane that contains h^H:
/// w_zf is the zero-forcing member (nulls g_o), w_zf_perp the in-LOS member.
/// a and b are the norms of the complement/LOS projections of h^H, so
/// a^2 + b^2 = |h|^2.
struct BeamformerFamily {
  Eigen::VectorXcd w_zf;
  Eigen::VectorXcd w_zf_perp;
  double a = 0.0;  // |P_perp h^H|
  double b = 0.0;  // |P_los h^H|
};

inline BeamformerFamily build_family(const MainChannel& ch, const SteeringVector& g_o) {
  const double g_norm2 = g_o.entries.squaredNorm();
  if (!(g_norm2 > 0.0)) throw std::domain_error("build_family: zero steering vector");
  const Eigen::VectorXcd h_herm = ch.h.adjoint();
  // P_los h^H = g_o^H (g_o h^H) / |g_o|^2; the complement is the remainder.
  const Complex g_dot_h = (g_o.entries * h_herm).value();
  const Eigen::VectorXcd p_los = g_o.entries.adjoint() * (g_dot_h / g_norm2);
  const Eigen::VectorXcd p_perp = h_herm - p_los;

  BeamformerFamily fam;
  fam.a = p_perp.norm();
  fam.b = p_los.norm();
  const double tol = 1e-9 * ch.h.norm();
  if (!(fam.a > tol)) {
    std::ostringstream msg;
    msg << "degenerate geometry: |P_perp h^H| = " << fam.a << " <= tolerance " << tol
        << " (h is numerically parallel to g_o^H, w_zf undefined)";
    throw DegenerateGeometry(msg.str());
  }
  if (!(fam.b > tol)) {
    std::ostringstream msg;
    msg << "degenerate geometry: |P_los h^H| = " << fam.b << " <= tolerance " << tol
        << " (h is numerically orthogonal to g_o^H, w_zf_perp undefined)";
    throw DegenerateGeometry(msg.str());
  }
  fam.w_zf = p_perp / fam.a;
  fam.w_zf_perp = p_los / fam.b;
  return fam;
}

/// Maximum-ratio transmission, the fallback when the family is degenerate.
inline Eigen::VectorXcd mrt_beamformer(const MainChannel& ch) {
  const double n = ch.h.norm();
  if (!(n > 0.0)) throw std::domain_error("mrt_beamformer: zero channel");
  return ch.h.adjoint() / n;
}

/// w(tau) = sqrt(tau) w_zf + sqrt(1-tau) w_zf_perp; unit norm for tau in [0,1].
inline Eigen::VectorXcd combine(const BeamformerFamily& fam, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("combine: tau must lie in [0, 1]");
  if (tau == 1.0) return fam.w_zf;
  if (tau == 0.0) return fam.w_zf_perp;
  return std::sqrt(tau) * fam.w_zf + std::sqrt(1.0 - tau) * fam.w_zf_perp;
}

/// Instantaneous SNR at Bob for a unit-norm beamformer.
inline double bob_snr(const MainChannel& ch, const Eigen::VectorXcd& w, double mean_snr_bob) {
  const Complex hw = (ch.h * w).value();
  return mean_snr_bob * std::norm(hw);
}

/// Instantaneous SNR at Eve under maximal ratio combining.
inline double eve_snr(const EveChannel& ch, const Eigen::VectorXcd& w, double mean_snr_eve) {
  return mean_snr_eve * (ch.g * w).squaredNorm();
}

}  // namespace lbb
