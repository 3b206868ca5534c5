#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "adr/data.hpp"

using namespace adr;

namespace {

std::string with_checksum(std::string line68) {
  REQUIRE(line68.size() == 68);
  return line68 + static_cast<char>('0' + tle_checksum(line68));
}

TleRecord make_tle(double inc_deg, double raan_deg, const char* ecc7, double argp_deg,
                   double ma_deg, double mm_rev_day) {
  std::string line1 = "1 24946U 97051C   09055.51782528  .00000132  00000-0  45767-4 0";
  line1.resize(68, ' ');
  char line2[80];
  std::snprintf(line2, sizeof line2, "2 24946 %8.4f %8.4f %s %8.4f %8.4f %11.8f12345",
                inc_deg, raan_deg, ecc7, argp_deg, ma_deg, mm_rev_day);
  REQUIRE(std::string(line2).size() == 68);
  return {"IRIDIUM 33 DEB", with_checksum(line1), with_checksum(line2)};
}

std::string csv_text(const DebrisCatalog& catalog) {
  std::ostringstream out;
  save_csv_stream(catalog, out);
  return out.str();
}

}  // namespace

TEST_CASE("well-formed CSV loads in file order") {
  std::istringstream in(
      "id,a_km,i_deg,omega_deg,nu_deg\n"
      "D1,7100,86.4,10,20\n"
      "D2,7150.5,86.0,30,40\n");
  const DebrisCatalog catalog = load_csv_stream(in, "mem");
  REQUIRE(catalog.size() == 2);
  CHECK(catalog[0].id == "D1");
  CHECK(catalog[1].id == "D2");
  CHECK(catalog[0].elements.a_km == 7100.0);
  CHECK(catalog[1].elements.inc_rad == doctest::Approx(86.0 * kDegToRad));
  CHECK(catalog[0].initial_risk == kBaseRisk);
}

TEST_CASE("CSV diagnostics carry the line number") {
  SUBCASE("duplicate id") {
    std::istringstream in(
        "id,a_km,i_deg,omega_deg,nu_deg\nD1,7100,86,0,0\nD1,7200,86,0,0\n");
    CHECK_THROWS_WITH_AS(load_csv_stream(in, "mem"),
                         "mem:3: duplicate id 'D1'", std::runtime_error);
  }
  SUBCASE("bad header") {
    std::istringstream in("id,a_km\nD1,7100\n");
    CHECK_THROWS_AS(load_csv_stream(in, "mem"), std::runtime_error);
  }
  SUBCASE("unparsable number") {
    std::istringstream in("id,a_km,i_deg,omega_deg,nu_deg\nD1,seven,86,0,0\n");
    try {
      load_csv_stream(in, "mem");
      FAIL("expected a diagnostic");
    } catch (const std::runtime_error& e) {
      const std::string what = e.what();
      CHECK(what.find("mem:2") != std::string::npos);
      CHECK(what.find("a_km") != std::string::npos);
    }
  }
  SUBCASE("missing column") {
    std::istringstream in("id,a_km,i_deg,omega_deg,nu_deg\nD1,7100,86,0\n");
    CHECK_THROWS_AS(load_csv_stream(in, "mem"), std::runtime_error);
  }
  SUBCASE("semi-major axis below the Earth radius") {
    std::istringstream in("id,a_km,i_deg,omega_deg,nu_deg\nD1,6000,86,0,0\n");
    try {
      load_csv_stream(in, "mem");
      FAIL("expected a diagnostic");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
    }
  }
}

TEST_CASE("inclination of 360 degrees normalizes to zero") {
  std::istringstream in("id,a_km,i_deg,omega_deg,nu_deg\nD1,7100,360,0,0\n");
  const DebrisCatalog catalog = load_csv_stream(in, "mem");
  CHECK(catalog[0].elements.inc_rad == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("save/load round-trips catalogs") {
  const DebrisCatalog catalog = generate_cloud(20, 99);
  std::istringstream in(csv_text(catalog));
  const DebrisCatalog back = load_csv_stream(in, "mem");
  REQUIRE(back.size() == catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    CHECK(back[i].id == catalog[i].id);
    CHECK(back[i].elements.a_km ==
          doctest::Approx(catalog[i].elements.a_km).epsilon(1e-12));
    CHECK(back[i].elements.inc_rad ==
          doctest::Approx(catalog[i].elements.inc_rad).epsilon(1e-12));
    CHECK(back[i].elements.omega_rad ==
          doctest::Approx(catalog[i].elements.omega_rad).epsilon(1e-12));
    CHECK(back[i].elements.nu_rad ==
          doctest::Approx(catalog[i].elements.nu_rad).epsilon(1e-12));
  }
}

TEST_CASE("TLE checksum rule") {
  // Digits sum plus one per '-' sign, mod 10.
  CHECK(tle_checksum("2 00005") == 7);
  CHECK(tle_checksum("-") == 1);
  CHECK(tle_checksum("abc def") == 0);
}

TEST_CASE("TLE parse recovers near-circular elements") {
  const TleRecord record = make_tle(86.385, 123.4567, "0001230", 90.1234, 270.5678, 14.0);
  const TleFields fields = parse_tle_fields(record);
  CHECK(fields.inclination_deg == doctest::Approx(86.385));
  CHECK(fields.raan_deg == doctest::Approx(123.4567));
  CHECK(fields.eccentricity == doctest::Approx(0.000123));
  CHECK(fields.mean_motion_rev_day == doctest::Approx(14.0));

  const OrbitalElements elements = parse_tle(record);
  // Independently evaluated inversion of T = 86400/14.
  CHECK(elements.a_km == doctest::Approx(7271.93214068553).epsilon(1e-10));
  CHECK(elements.inc_rad == doctest::Approx(86.385 * kDegToRad));
  CHECK(elements.omega_rad == doctest::Approx(90.1234 * kDegToRad));
  CHECK(elements.nu_rad == doctest::Approx(270.5678 * kDegToRad));
}

TEST_CASE("TLE mean motion round-trips through the semi-major axis") {
  const double mm = 14.82366876;  // close to a 7000 km orbit
  const TleRecord record = make_tle(86.4, 0.0, "0000500", 0.0, 0.0, mm);
  const OrbitalElements elements = parse_tle(record);
  const double period = kTwoPi * std::sqrt(elements.a_km * elements.a_km *
                                           elements.a_km / kMuEarthKm3S2);
  CHECK(86400.0 / period == doctest::Approx(mm).epsilon(1e-9));
}

TEST_CASE("TLE rejection paths") {
  SUBCASE("eccentricity bound") {
    const TleRecord record = make_tle(86.4, 0.0, "2000000", 0.0, 0.0, 14.0);
    CHECK_THROWS_AS(parse_tle(record), std::runtime_error);
  }
  SUBCASE("checksum failure") {
    TleRecord record = make_tle(86.4, 0.0, "0001230", 0.0, 0.0, 14.0);
    record.line2.back() = record.line2.back() == '9' ? '0' : record.line2.back() + 1;
    CHECK_THROWS_AS(parse_tle(record), std::runtime_error);
  }
  SUBCASE("short line") {
    TleRecord record = make_tle(86.4, 0.0, "0001230", 0.0, 0.0, 14.0);
    record.line1.resize(40);
    CHECK_THROWS_AS(parse_tle(record), std::runtime_error);
  }
}

TEST_CASE("TLE files load record groups and skip rejects with a warning") {
  const auto path = std::filesystem::temp_directory_path() / "adr_tle_test.txt";
  {
    std::ofstream out(path);
    const TleRecord good = make_tle(86.4, 10.0, "0001230", 20.0, 30.0, 14.2);
    const TleRecord eccentric = make_tle(86.4, 10.0, "2000000", 20.0, 30.0, 14.2);
    const TleRecord also_good = make_tle(74.0, 40.0, "0004000", 50.0, 60.0, 14.8);
    out << "DEB A\n" << good.line1 << '\n' << good.line2 << '\n';
    out << "DEB B\n" << eccentric.line1 << '\n' << eccentric.line2 << '\n';
    out << "DEB C\n" << also_good.line1 << '\n' << also_good.line2 << '\n';
  }
  std::ostringstream warnings;
  const DebrisCatalog catalog = load_tle(path.string(), &warnings);
  CHECK(catalog.size() == 2);
  CHECK(catalog[0].id == "DEB A");
  CHECK(catalog[1].id == "DEB C");
  CHECK(warnings.str().find("near-circular") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic cloud is deterministic per seed") {
  const DebrisCatalog a = generate_cloud(320, 7);
  const DebrisCatalog b = generate_cloud(320, 7);
  CHECK(csv_text(a) == csv_text(b));
  const DebrisCatalog c = generate_cloud(320, 8);
  CHECK(csv_text(a) != csv_text(c));
}

TEST_CASE("synthetic cloud matches the configured distribution") {
  const DebrisCatalog catalog = generate_cloud(320, 42);
  REQUIRE(catalog.size() == 320);
  for (const auto& record : catalog.debris) {
    CHECK(record.elements.a_km >= 7050.0);
    CHECK(record.elements.a_km <= 7250.0);
    // 6 sigma around 86.4 degrees.
    CHECK(record.elements.inc_rad >= 80.0 * kDegToRad);
    CHECK(record.elements.inc_rad <= 93.0 * kDegToRad);
  }
}

TEST_CASE("cloud catalogs satisfy the catalog invariants across seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DebrisCatalog catalog = generate_cloud(12, seed);
    REQUIRE(catalog.size() == 12);
    CHECK_NOTHROW(catalog.validate());
    for (const auto& record : catalog.debris) {
      CHECK(record.elements.a_km > kEarthRadiusKm);
      CHECK(record.elements.inc_rad >= 0.0);
      CHECK(record.elements.inc_rad <= kPi);
      CHECK(record.elements.omega_rad >= 0.0);
      CHECK(record.elements.omega_rad < kTwoPi);
      CHECK(record.elements.nu_rad >= 0.0);
      CHECK(record.elements.nu_rad < kTwoPi);
      CHECK(record.initial_risk == kBaseRisk);
    }
  }
}

TEST_CASE("cloud generation edge cases") {
  const DebrisCatalog single = generate_cloud(1, 3);
  CHECK(single.size() == 1);
  CHECK_THROWS_AS(generate_cloud(0, 3), std::invalid_argument);
  CloudRanges bad;
  bad.a_min_km = 7300.0;
  bad.a_max_km = 7200.0;
  CHECK_THROWS_AS(generate_cloud(5, 3, bad), std::invalid_argument);
  CloudRanges low;
  low.a_min_km = 6000.0;
  CHECK_THROWS_AS(generate_cloud(5, 3, low), std::invalid_argument);
}

TEST_CASE("duplicate ids fail catalog validation") {
  DebrisCatalog catalog;
  catalog.debris.push_back({"X", OrbitalElements(7100, 1.5, 0, 0), 1});
  catalog.debris.push_back({"X", OrbitalElements(7200, 1.5, 0, 0), 1});
  CHECK_THROWS_AS(catalog.validate(), std::runtime_error);
}
