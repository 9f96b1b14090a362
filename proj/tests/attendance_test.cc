#include <limits>

#include "doctest.h"
#include "sac/attendance.h"
#include "sac/error.h"
#include "sac/random.h"

using namespace sac;

namespace {

ModuleTermRecord record(int weeks, std::vector<WeekObservation> obs) {
  return ModuleTermRecord("M1", 1, weeks, std::move(obs));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected sac::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("attendance_average over taken weeks") {
  SUBCASE("full attendance is 100") {
    std::vector<WeekObservation> obs;
    for (int w = 1; w <= 11; ++w) obs.push_back({w, 30, 30, true});
    CHECK(attendance_average(record(11, obs)) == 100.0);
  }
  SUBCASE("one taken week out of 11 with everyone present") {
    std::vector<WeekObservation> obs{{4, 25, 25, true}};
    for (int w : {1, 2, 3, 5}) obs.push_back({w, 0, 25, false});
    const auto r = record(11, obs);
    CHECK(r.taken_count() == 1);
    CHECK(attendance_average(r) == 100.0);
  }
  SUBCASE("two taken weeks, 10 and 15 of 20") {
    const auto r = record(11, {{2, 10, 20, true}, {5, 15, 20, true}});
    CHECK(attendance_average(r) == doctest::Approx(62.5).epsilon(1e-12));
  }
  SUBCASE("per-week registered counts") {
    const auto r = record(11, {{1, 10, 20, true}, {2, 10, 10, true}});
    CHECK(attendance_average(r) == doctest::Approx(75.0).epsilon(1e-12));
  }
  SUBCASE("untaken weeks are ignored even with junk counts") {
    const auto r = record(11, {{1, 10, 20, true}, {2, 999, 20, false}});
    CHECK(attendance_average(r) == doctest::Approx(50.0).epsilon(1e-12));
  }
  SUBCASE("no taken week") {
    const auto r = record(11, {{1, 0, 20, false}});
    CHECK(kind_of([&] { attendance_average(r); }) == ErrorKind::NoAttendanceTaken);
    CHECK_FALSE(r.attend_avg().has_value());
    CHECK_FALSE(r.sac().has_value());
  }
}

TEST_CASE("ModuleTermRecord validation") {
  CHECK(kind_of([] { record(11, {{12, 1, 2, true}}); }) == ErrorKind::WeekOutOfRange);
  CHECK(kind_of([] { record(11, {{0, 1, 2, true}}); }) == ErrorKind::WeekOutOfRange);
  CHECK(kind_of([] { record(11, {{1, 3, 2, true}}); }) == ErrorKind::InvalidRecord);
  CHECK(kind_of([] { record(11, {{1, 0, 0, true}}); }) == ErrorKind::InvalidRecord);
  CHECK(kind_of([] { record(11, {{1, 1, 2, true}, {1, 1, 2, true}}); }) ==
        ErrorKind::InvalidRecord);
  CHECK(kind_of([] { ModuleTermRecord("M", 3, 11, {}); }) == ErrorKind::InvalidRecord);
  CHECK(kind_of([] { ModuleTermRecord("M", 1, 0, {}); }) == ErrorKind::InvalidRecord);
}

TEST_CASE("sac worked values") {
  CHECK(sac::sac(100, 11, 11) == 1.0);
  CHECK(sac::sac(81.2, 11, 11) == doctest::Approx(0.812).epsilon(1e-12));
  CHECK(sac::sac(50, 7, 11) == doctest::Approx(50.0 * 7 / 1100.0).epsilon(1e-12));
  CHECK(sac::sac(0, 1, 11) == 0.0);
}

TEST_CASE("sac input errors") {
  CHECK(kind_of([] { sac::sac(50, 0, 11); }) == ErrorKind::InvalidCounts);
  CHECK(kind_of([] { sac::sac(50, 12, 11); }) == ErrorKind::InvalidCounts);
  CHECK(kind_of([] { sac::sac(50, 1, 0); }) == ErrorKind::InvalidCounts);
  CHECK(kind_of([] { sac::sac(100.01, 1, 11); }) == ErrorKind::InvalidAverage);
  CHECK(kind_of([] { sac::sac(-1, 1, 11); }) == ErrorKind::InvalidAverage);
  CHECK(kind_of([] { sac::sac(std::numeric_limits<double>::quiet_NaN(), 1, 11); }) ==
        ErrorKind::InvalidAverage);
  CHECK(kind_of([] { z_components(50, 0, 11); }) == ErrorKind::InvalidCounts);
}

TEST_CASE("z_components") {
  auto z = z_components(70, 11, 11);
  CHECK(z.z1 == doctest::Approx(0.70));
  CHECK(z.z2 == 1.0);
  z = z_components(0, 1, 11);
  CHECK(z.z1 == 0.0);
  CHECK(z.z2 == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  z = z_components(50, 7, 11);
  CHECK(z.z1 == 0.5);
  CHECK(z.z2 == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("strength_bin intervals") {
  CHECK(strength_bin(0.067).value() == 1);
  CHECK(strength_bin(0.0).value() == 1);
  CHECK(strength_bin(0.1).value() == 2);
  CHECK(strength_bin(0.0999999).value() == 1);
  CHECK(strength_bin(0.349).value() == 4);
  CHECK(strength_bin(0.812).value() == 9);
  CHECK(strength_bin(0.9).value() == 10);
  CHECK(strength_bin(1.0).value() == 10);
  for (int k = 1; k <= 9; ++k) {
    CHECK(strength_bin(k / 10.0).value() == k + 1);
    CHECK(strength_bin(std::nextafter(k / 10.0, 0.0)).value() == k);
  }
  CHECK(kind_of([] { strength_bin(-1e-12); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { strength_bin(1.0000001); }) == ErrorKind::OutOfRange);
  CHECK(kind_of([] { SacStrength(0); }) == ErrorKind::OutOfRange);
}

TEST_CASE("sac properties over random triples") {
  Rng rng(20241015);
  for (int i = 0; i < 2000; ++i) {
    const auto c2 = static_cast<int>(rng.uniform_int(1, 52));
    const auto c1 = static_cast<int>(rng.uniform_int(1, c2));
    const double a = rng.uniform(0.0, 100.0);
    const double s = sac::sac(a, c1, c2);
    REQUIRE(s >= 0.0);
    REQUIRE(s <= 1.0);
    const auto z = z_components(a, c1, c2);
    REQUIRE(std::abs(z.z1 * z.z2 - s) <= 1e-12);
    // Strictly decreasing in C2.
    REQUIRE((a == 0.0 || sac::sac(a, c1, c2 + 1) < s));
  }
}

TEST_CASE("attendance_average stays in [0,100]") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto weeks = static_cast<int>(rng.uniform_int(1, 15));
    std::vector<WeekObservation> obs;
    for (int w = 1; w <= weeks; ++w) {
      const auto y = static_cast<int>(rng.uniform_int(1, 300));
      obs.push_back({w, static_cast<int>(rng.uniform_int(0, y)), y, rng.bernoulli(0.6)});
    }
    obs.front().taken = true;
    const double a = attendance_average(record(weeks, obs));
    REQUIRE(a >= 0.0);
    REQUIRE(a <= 100.0);
  }
}
