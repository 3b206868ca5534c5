#pragma once

#include <functional>

namespace adr {

inline constexpr double kMuEarthKm3S2 = 398600.4418;  // GM of Earth [km^3/s^2]
inline constexpr double kEarthRadiusKm = 6378.137;    // equatorial radius [km]
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// Mean motions closer than this [rad/s] count as equal for phasing.
inline constexpr double kEqualRateTolRadS = 1e-9;

struct GravConstants {
  double mu = kMuEarthKm3S2;        // gravitational parameter [km^3/s^2]
  double r_earth = kEarthRadiusKm;  // [km]
};

// Reduce an angle into [0, 2*pi).
double normalize_two_pi(double angle_rad);

// Reduce an angle into [0, pi] (inclination range; values past pi reflect).
double normalize_inclination(double angle_rad);

// Circular-orbit Keplerian state of one debris. Angles are stored in
// radians and normalized on construction.
struct OrbitalElements {
  double a_km;       // semi-major axis [km], > kEarthRadiusKm
  double inc_rad;    // inclination [0, pi]
  double omega_rad;  // argument of periapsis [0, 2pi)
  double nu_rad;     // true anomaly [0, 2pi)

  // Throws std::domain_error on non-finite input or a at/below the Earth
  // equatorial radius.
  OrbitalElements(double a, double inc, double omega, double nu);

  // Combined in-plane phase u = omega + nu in [0, 2pi). For circular orbits
  // omega is degenerate; only the sum carries geometry.
  double in_plane_phase() const;

  bool operator==(const OrbitalElements&) const = default;
};

struct TransferCost {
  double delta_v_km_s = 0.0;
  double delta_t_s = 0.0;
};

struct HohmannLegs {
  double dv_depart_km_s;
  double dv_arrive_km_s;
  double time_s;  // half-ellipse coast time
};

// sqrt(mu / a). Throws std::domain_error for a <= 0.
double circular_speed(double a_km, double mu = kMuEarthKm3S2);

// Impulsive plane rotation by |delta_i| at speed v: 2 v sin(delta_i / 2).
// The sign of delta_i is ignored; |delta_i| > pi throws std::domain_error.
double plane_change_dv(double v_km_s, double delta_i_rad);

// Two-burn transfer between circular radii a1 -> a2.
HohmannLegs hohmann(double a1_km, double a2_km, double mu = kMuEarthKm3S2);

// Coast time closing an in-plane phase gap [rad, taken mod 2pi] between two
// circular orbits. Equal mean motions (within kEqualRateTolRadS) degenerate
// to one full period of the from-orbit.
double phasing_time(double a_from_km, double a_to_km, double phase_gap_rad,
                    double mu = kMuEarthKm3S2);

// Full three-maneuver transfer: impulsive plane change executed at the slower
// of the two circular speeds, Hohmann between the radii, fuel-free phasing
// coast. delta_t adds the Hohmann coast only when the radii actually differ,
// so an identical-shape transfer charges exactly the degenerate phasing
// period. delta_v is symmetric under endpoint exchange; delta_t is not (the
// phase gap is directional).
TransferCost transfer_cost(const OrbitalElements& from, const OrbitalElements& to,
                           const GravConstants& consts = {});

// Ordered-pair cost hook consumed by the environment and the oracle; tests
// inject stub providers here.
using CostProvider =
    std::function<TransferCost(const OrbitalElements&, const OrbitalElements&)>;

CostProvider make_transfer_cost_provider(GravConstants consts = {});

}  // namespace adr
