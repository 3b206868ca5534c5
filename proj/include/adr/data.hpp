#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adr/orbits.hpp"

namespace adr {

inline constexpr int kBaseRisk = 1;

struct DebrisRecord {
  std::string id;
  OrbitalElements elements;
  int initial_risk = kBaseRisk;
};

// Ordered debris list; the position in `debris` is the environment's action
// index.
struct DebrisCatalog {
  std::vector<DebrisRecord> debris;

  std::size_t size() const { return debris.size(); }
  const DebrisRecord& operator[](std::size_t i) const { return debris[i]; }

  // Throws std::runtime_error on duplicate ids.
  void validate() const;
};

// CSV schema: header `id,a_km,i_deg,omega_deg,nu_deg`, UTF-8, LF, dot
// decimal. Angles are degrees on disk, radians in memory.
DebrisCatalog load_csv(const std::string& path);
DebrisCatalog load_csv_stream(std::istream& in, const std::string& name);
void save_csv(const DebrisCatalog& catalog, const std::string& path);
void save_csv_stream(const DebrisCatalog& catalog, std::ostream& out);

struct TleRecord {
  std::string name;
  std::string line1;
  std::string line2;
};

struct TleFields {
  double inclination_deg = 0.0;
  double raan_deg = 0.0;  // stored for completeness, unused by the cost model
  double eccentricity = 0.0;
  double arg_perigee_deg = 0.0;
  double mean_anomaly_deg = 0.0;
  double mean_motion_rev_day = 0.0;
};

// Records with eccentricity at or above this are rejected as not
// near-circular.
inline constexpr double kTleMaxEccentricity = 0.05;

// Modulo-10 checksum over the first 68 characters of a TLE line (digits count
// as themselves, '-' counts as 1).
int tle_checksum(std::string_view line);

// Fixed-column parse of lines 1/2. Throws std::runtime_error on short lines,
// bad checksums, or unparsable fields.
TleFields parse_tle_fields(const TleRecord& record);

// Near-circular element recovery: a from the mean motion, nu approximated by
// the mean anomaly. Throws when the eccentricity bound is violated.
OrbitalElements parse_tle(const TleRecord& record, const GravConstants& consts = {});

// Reads name/line1/line2 groups; rejected records are skipped with a warning
// on `warnings` (when non-null).
DebrisCatalog load_tle(const std::string& path, std::ostream* warnings = nullptr);

// Iridium-33-like defaults: tight altitude shell, near-polar inclination.
struct CloudRanges {
  double a_min_km = 7050.0;
  double a_max_km = 7250.0;
  double inc_mean_rad = 86.4 * kDegToRad;
  double inc_sigma_rad = 0.5 * kDegToRad;
};

// Deterministic synthetic cloud: a uniform in [a_min, a_max], inclination
// normal around the mean, omega and nu uniform in [0, 2pi). Ids are
// SYN-0000, SYN-0001, ...
DebrisCatalog generate_cloud(int n, std::uint64_t seed, const CloudRanges& ranges = {});

}  // namespace adr
