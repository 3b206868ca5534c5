#include "adr/data.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "adr/rng.hpp"

namespace adr {

namespace {

[[noreturn]] void fail(const std::string& where, int line, const std::string& what) {
  throw std::runtime_error(where + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, const std::string& where, int line,
                    const std::string& column) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(where, line, "unparsable number '" + std::string(text) + "' in column " + column);
  }
  return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

constexpr const char* kCsvHeader = "id,a_km,i_deg,omega_deg,nu_deg";

}  // namespace

void DebrisCatalog::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& record : debris) {
    if (!seen.insert(record.id).second) {
      throw std::runtime_error("duplicate debris id '" + record.id + "'");
    }
  }
}

DebrisCatalog load_csv_stream(std::istream& in, const std::string& name) {
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) fail(name, 1, "empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    fail(name, line_no, "expected header '" + std::string(kCsvHeader) + "', got '" + line + "'");
  }

  DebrisCatalog catalog;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      fail(name, line_no,
           "expected 5 columns, got " + std::to_string(fields.size()));
    }
    std::string id(fields[0]);
    if (id.empty()) fail(name, line_no, "empty id");
    if (!seen.insert(id).second) {
      fail(name, line_no, "duplicate id '" + id + "'");
    }
    const double a = parse_double(fields[1], name, line_no, "a_km");
    const double i_deg = parse_double(fields[2], name, line_no, "i_deg");
    const double omega_deg = parse_double(fields[3], name, line_no, "omega_deg");
    const double nu_deg = parse_double(fields[4], name, line_no, "nu_deg");
    try {
      catalog.debris.push_back(
          {std::move(id),
           OrbitalElements(a, i_deg * kDegToRad, omega_deg * kDegToRad,
                           nu_deg * kDegToRad),
           kBaseRisk});
    } catch (const std::domain_error& e) {
      fail(name, line_no, e.what());
    }
  }
  return catalog;
}

DebrisCatalog load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog file '" + path + "'");
  return load_csv_stream(in, path);
}

void save_csv_stream(const DebrisCatalog& catalog, std::ostream& out) {
  out << kCsvHeader << '\n';
  char buf[128];
  for (const auto& record : catalog.debris) {
    out << record.id;
    const double cols[4] = {record.elements.a_km, record.elements.inc_rad * kRadToDeg,
                            record.elements.omega_rad * kRadToDeg,
                            record.elements.nu_rad * kRadToDeg};
    for (const double value : cols) {
      std::snprintf(buf, sizeof buf, ",%.17g", value);
      out << buf;
    }
    out << '\n';
  }
}

void save_csv(const DebrisCatalog& catalog, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write catalog file '" + path + "'");
  save_csv_stream(catalog, out);
  out.flush();
  if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

int tle_checksum(std::string_view line) {
  int sum = 0;
  const std::size_t n = line.size() < 68 ? line.size() : std::size_t{68};
  for (std::size_t i = 0; i < n; ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') sum += c - '0';
    if (c == '-') sum += 1;
  }
  return sum % 10;
}

namespace {

void check_tle_line(const std::string& line, int which) {
  if (line.size() < 69) {
    throw std::runtime_error("TLE line " + std::to_string(which) + " shorter than 69 characters");
  }
  if (line[0] != static_cast<char>('0' + which)) {
    throw std::runtime_error("TLE line " + std::to_string(which) + " has wrong line number");
  }
  const int expected = line[68] - '0';
  if (tle_checksum(line) != expected) {
    throw std::runtime_error("TLE line " + std::to_string(which) + " checksum mismatch");
  }
}

double tle_field(const std::string& line, int col_from_1, int col_to_1,
                 const char* what) {
  std::string text = line.substr(col_from_1 - 1, col_to_1 - col_from_1 + 1);
  // Fields are right-aligned with space padding.
  std::size_t b = text.find_first_not_of(' ');
  std::size_t e = text.find_last_not_of(' ');
  if (b == std::string::npos) throw std::runtime_error(std::string("empty TLE field ") + what);
  text = text.substr(b, e - b + 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("unparsable TLE field " + std::string(what) + " '" + text + "'");
  }
}

}  // namespace

TleFields parse_tle_fields(const TleRecord& record) {
  check_tle_line(record.line1, 1);
  check_tle_line(record.line2, 2);
  TleFields f;
  f.inclination_deg = tle_field(record.line2, 9, 16, "inclination");
  f.raan_deg = tle_field(record.line2, 18, 25, "raan");
  // Eccentricity has an implied leading decimal point.
  f.eccentricity = tle_field(record.line2, 27, 33, "eccentricity") * 1e-7;
  f.arg_perigee_deg = tle_field(record.line2, 35, 42, "argument of perigee");
  f.mean_anomaly_deg = tle_field(record.line2, 44, 51, "mean anomaly");
  f.mean_motion_rev_day = tle_field(record.line2, 53, 63, "mean motion");
  return f;
}

OrbitalElements parse_tle(const TleRecord& record, const GravConstants& consts) {
  const TleFields f = parse_tle_fields(record);
  if (f.eccentricity >= kTleMaxEccentricity) {
    throw std::runtime_error("record '" + record.name + "' eccentricity " +
                             std::to_string(f.eccentricity) +
                             " violates the near-circular bound");
  }
  if (f.mean_motion_rev_day <= 0.0) {
    throw std::runtime_error("record '" + record.name + "' has non-positive mean motion");
  }
  const double period_s = 86400.0 / f.mean_motion_rev_day;
  const double ratio = period_s / kTwoPi;
  const double a_km = std::cbrt(consts.mu * ratio * ratio);
  return OrbitalElements(a_km, f.inclination_deg * kDegToRad,
                         f.arg_perigee_deg * kDegToRad,
                         f.mean_anomaly_deg * kDegToRad);
}

DebrisCatalog load_tle(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open TLE file '" + path + "'");

  DebrisCatalog catalog;
  std::string line;
  TleRecord record;
  int state = 0;  // 0 = expect name or line1, 1 = expect line1, 2 = expect line2
  auto flush = [&]() {
    try {
      catalog.debris.push_back({record.name.empty()
                                    ? "TLE-" + std::to_string(catalog.size())
                                    : record.name,
                                parse_tle(record), kBaseRisk});
    } catch (const std::exception& e) {
      if (warnings) *warnings << "warning: skipping TLE record: " << e.what() << '\n';
    }
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '1' && line.size() >= 69) {
      record.line1 = line;
      state = 2;
    } else if (line[0] == '2' && line.size() >= 69 && state == 2) {
      record.line2 = line;
      flush();
      record = {};
      state = 0;
    } else {
      std::string name = line;
      const std::size_t end = name.find_last_not_of(' ');
      record.name = end == std::string::npos ? "" : name.substr(0, end + 1);
      state = 1;
    }
  }
  catalog.validate();
  return catalog;
}

DebrisCatalog generate_cloud(int n, std::uint64_t seed, const CloudRanges& ranges) {
  if (n < 1) throw std::invalid_argument("generate_cloud: n must be >= 1");
  if (!(ranges.a_min_km <= ranges.a_max_km) || ranges.inc_sigma_rad < 0.0) {
    throw std::invalid_argument("generate_cloud: degenerate ranges");
  }
  if (ranges.a_min_km <= kEarthRadiusKm) {
    throw std::invalid_argument("generate_cloud: altitude range dips below the Earth radius");
  }

  Pcg64 rng(seed, rng_stream::kCloud);
  DebrisCatalog catalog;
  catalog.debris.reserve(static_cast<std::size_t>(n));
  char id[32];
  for (int k = 0; k < n; ++k) {
    const double a = rng.uniform(ranges.a_min_km, ranges.a_max_km);
    const double inc =
        normalize_inclination(ranges.inc_mean_rad + ranges.inc_sigma_rad * rng.normal());
    const double omega = rng.uniform(0.0, kTwoPi);
    const double nu = rng.uniform(0.0, kTwoPi);
    std::snprintf(id, sizeof id, "SYN-%04d", k);
    catalog.debris.push_back({id, OrbitalElements(a, inc, omega, nu), kBaseRisk});
  }
  return catalog;
}

}  // namespace adr
