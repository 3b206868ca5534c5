#include "adr/orbits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adr {

double normalize_two_pi(double angle_rad) {
  double a = std::fmod(angle_rad, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;  // fmod can land exactly on 2pi after the add
  return a;
}

double normalize_inclination(double angle_rad) {
  double a = normalize_two_pi(angle_rad);
  if (a > kPi) a = kTwoPi - a;
  return a;
}

OrbitalElements::OrbitalElements(double a, double inc, double omega, double nu)
    : a_km(a),
      inc_rad(normalize_inclination(inc)),
      omega_rad(normalize_two_pi(omega)),
      nu_rad(normalize_two_pi(nu)) {
  if (!std::isfinite(a) || !std::isfinite(inc) || !std::isfinite(omega) ||
      !std::isfinite(nu)) {
    throw std::domain_error("orbital elements must be finite");
  }
  if (a <= kEarthRadiusKm) {
    throw std::domain_error("semi-major axis " + std::to_string(a) +
                            " km is not above the Earth equatorial radius");
  }
}

double OrbitalElements::in_plane_phase() const {
  return normalize_two_pi(omega_rad + nu_rad);
}

double circular_speed(double a_km, double mu) {
  if (!(a_km > 0.0)) {
    throw std::domain_error("circular_speed: semi-major axis must be positive");
  }
  return std::sqrt(mu / a_km);
}

double plane_change_dv(double v_km_s, double delta_i_rad) {
  const double di = std::fabs(delta_i_rad);
  if (!std::isfinite(di) || di > kPi) {
    throw std::domain_error("plane_change_dv: |delta_i| must lie in [0, pi]");
  }
  return 2.0 * v_km_s * std::sin(0.5 * di);
}

HohmannLegs hohmann(double a1_km, double a2_km, double mu) {
  const double sum = a1_km + a2_km;
  const double dv_depart =
      std::sqrt(mu / a1_km) * std::fabs(std::sqrt(2.0 * a2_km / sum) - 1.0);
  const double dv_arrive =
      std::sqrt(mu / a2_km) * std::fabs(1.0 - std::sqrt(2.0 * a1_km / sum));
  const double a_ellipse = 0.5 * sum;
  const double time_s = kPi * std::sqrt(a_ellipse * a_ellipse * a_ellipse / mu);
  return {dv_depart, dv_arrive, time_s};
}

double phasing_time(double a_from_km, double a_to_km, double phase_gap_rad,
                    double mu) {
  const double n_from = std::sqrt(mu / (a_from_km * a_from_km * a_from_km));
  const double n_to = std::sqrt(mu / (a_to_km * a_to_km * a_to_km));
  const double rate = std::fabs(n_from - n_to);
  if (rate < kEqualRateTolRadS) {
    return kTwoPi / n_from;  // one full period of the from-orbit
  }
  return normalize_two_pi(phase_gap_rad) / rate;
}

TransferCost transfer_cost(const OrbitalElements& from, const OrbitalElements& to,
                           const GravConstants& consts) {
  // Rotating the plane at the slower (higher) endpoint is the cheaper leg
  // order and keeps the delta-v cost symmetric under endpoint exchange.
  const double v_plane = circular_speed(std::fmax(from.a_km, to.a_km), consts.mu);
  const double dv_plane = plane_change_dv(v_plane, to.inc_rad - from.inc_rad);
  const HohmannLegs legs = hohmann(from.a_km, to.a_km, consts.mu);

  const double gap = normalize_two_pi(to.in_plane_phase() - from.in_plane_phase());
  const double t_phase = phasing_time(from.a_km, to.a_km, gap, consts.mu);

  TransferCost cost;
  cost.delta_v_km_s = dv_plane + legs.dv_depart_km_s + legs.dv_arrive_km_s;
  // Equal radii mean no ellipse is flown; the only time charge is the
  // (degenerate) phasing coast.
  cost.delta_t_s = t_phase + (from.a_km == to.a_km ? 0.0 : legs.time_s);
  return cost;
}

CostProvider make_transfer_cost_provider(GravConstants consts) {
  return [consts](const OrbitalElements& from, const OrbitalElements& to) {
    return transfer_cost(from, to, consts);
  };
}

}  // namespace adr
