#include <sstream>

#include <fmt/format.h>

#include "doctest.h"
#include "sac/error.h"
#include "sac/ingest.h"
#include "sac/random.h"

using namespace sac;

namespace {

EventBatch parse(const std::string& text) {
  std::istringstream in(text);
  return parse_events(in);
}

AttendanceEvent ev(std::string student, std::string module, int week,
                   AttendanceStatus st = AttendanceStatus::present, int semester = 1) {
  return {std::move(student), std::move(module), semester, week, st};
}

std::string header() { return std::string(kEventsHeader) + "\n"; }

}  // namespace

TEST_CASE("parse_events") {
  SUBCASE("header only") {
    const auto b = parse(header());
    CHECK(b.events.empty());
    CHECK(b.report.rows_read == 0);
  }
  SUBCASE("missing header") {
    CHECK_THROWS_AS(parse(""), Error);
    CHECK_THROWS_WITH(parse("a,b,c\nx,y,z\n"), doctest::Contains("MissingHeader"));
  }
  SUBCASE("case-insensitive status and trimming") {
    const auto b = parse(header() + "s1,M1,1,3, Present \ns2,M1,1,3,ABSENT\r\n");
    REQUIRE(b.events.size() == 2);
    CHECK(b.events[0].status == AttendanceStatus::present);
    CHECK(b.events[1].status == AttendanceStatus::absent);
    CHECK(b.events[0].week_index == 3);
  }
  SUBCASE("bad rows are rejected and counted") {
    const auto b = parse(header() +
                         "s1,M1,1,0,present\n"
                         "s1,M1,3,1,present\n"
                         "s1,M1,1,x,present\n"
                         "s1,M1,1,2,late\n"
                         "s1,M1,1,2\n"
                         ",M1,1,2,present\n"
                         "s1,M1,1,2,present\n");
    CHECK(b.report.rows_read == 7);
    CHECK(b.report.rows_rejected == 6);
    CHECK(b.report.kept == 1);
    REQUIRE(b.report.rejections.size() == 6);
    CHECK(b.report.rejections[0].line == 2);
    CHECK(b.report.rejections[0].reason.find("week") != std::string::npos);
    CHECK(b.report.rejections[1].reason.find("semester") != std::string::npos);
    CHECK(b.report.rejections[3].reason.find("status") != std::string::npos);
  }
}

TEST_CASE("clean_events") {
  using S = AttendanceStatus;
  SUBCASE("exact duplicate") {
    const auto b = clean_events({ev("s1", "M1", 1), ev("s1", "M1", 1)});
    CHECK(b.events.size() == 1);
    CHECK(b.report.duplicates_dropped == 1);
    CHECK(b.report.conflicts_resolved == 0);
  }
  SUBCASE("present beats absent") {
    const auto b = clean_events({ev("s1", "M1", 1, S::absent), ev("s1", "M1", 1, S::present)});
    REQUIRE(b.events.size() == 1);
    CHECK(b.events[0].status == S::present);
    CHECK(b.report.conflicts_resolved == 1);
    CHECK(b.report.rows_read == b.report.kept + b.report.duplicates_dropped + b.report.rows_rejected);
  }
  SUBCASE("clean input is unchanged and sorted") {
    const std::vector<AttendanceEvent> in{ev("s2", "M2", 1), ev("s1", "M1", 2), ev("s1", "M1", 1)};
    const auto b = clean_events(in);
    CHECK(b.report.duplicates_dropped == 0);
    CHECK(b.report.conflicts_resolved == 0);
    REQUIRE(b.events.size() == 3);
    CHECK(b.events[0] == in[2]);
    CHECK(b.events[1] == in[1]);
    CHECK(b.events[2] == in[0]);
  }
  SUBCASE("idempotent on random noisy input") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<AttendanceEvent> events;
      for (int i = 0; i < 200; ++i) {
        events.push_back(ev(fmt::format("s{}", rng.uniform_int(1, 6)),
                            fmt::format("M{}", rng.uniform_int(1, 3)),
                            static_cast<int>(rng.uniform_int(1, 4)),
                            rng.bernoulli(0.5) ? S::present : S::absent,
                            static_cast<int>(rng.uniform_int(1, 2))));
      }
      const auto once = clean_events(events);
      const auto twice = clean_events(once.events);
      REQUIRE(twice.events == once.events);
      REQUIRE(twice.report.duplicates_dropped == 0);
      REQUIRE(once.report.rows_read == once.report.kept + once.report.duplicates_dropped);
      // Input order does not matter.
      rng.shuffle(std::span<AttendanceEvent>(events));
      REQUIRE(clean_events(events).events == once.events);
    }
  }
}

TEST_CASE("aggregate") {
  std::vector<RosterEntry> roster{{"M1", 1, 20}};
  SUBCASE("perfect module") {
    std::vector<AttendanceEvent> events;
    for (int w = 1; w <= 11; ++w) {
      for (int s = 1; s <= 20; ++s) events.push_back(ev(fmt::format("s{:02d}", s), "M1", w));
    }
    const auto r = aggregate(events, std::span<const RosterEntry>(roster), 11);
    REQUIRE(r.records.size() == 1);
    const auto sc = score(r.records[0]);
    CHECK(sc.attend_avg == 100.0);
    CHECK(sc.taken_count == 11);
    CHECK(sc.sac == 1.0);
    CHECK(sc.strength == 10);
  }
  SUBCASE("attendance taken only twice") {
    std::vector<AttendanceEvent> events;
    for (int w : {3, 7}) {
      for (int s = 1; s <= 20; ++s) events.push_back(ev(fmt::format("s{:02d}", s), "M1", w));
    }
    const auto r = aggregate(events, std::span<const RosterEntry>(roster), 11);
    const auto sc = score(r.records.at(0));
    CHECK(sc.taken_count == 2);
    CHECK(*sc.attend_avg == doctest::Approx(100.0));
    CHECK(*sc.sac == doctest::Approx(2.0 / 11.0).epsilon(1e-12));
    CHECK(sc.strength == 2);
  }
  SUBCASE("default Y is distinct students across the semester") {
    // s1 present weeks 1,2; s2 only appears (absent) in week 2.
    const std::vector<AttendanceEvent> events{ev("s1", "M1", 1), ev("s1", "M1", 2),
                                              ev("s2", "M1", 2, AttendanceStatus::absent)};
    const auto r = aggregate(events, std::nullopt, 11);
    const auto sc = score(r.records.at(0));
    CHECK(*sc.attend_avg == doctest::Approx(50.0));
  }
  SUBCASE("roster module without events is flagged") {
    std::vector<RosterEntry> two{{"M1", 1, 20}, {"M9", 2, 5}};
    const std::vector<AttendanceEvent> events{ev("s1", "M1", 1)};
    const auto r = aggregate(events, std::span<const RosterEntry>(two), 11);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[1].module_code() == "M9");
    CHECK(r.records[1].taken_count() == 0);
    const auto sc = score(r.records[1]);
    CHECK(sc.flagged());
    CHECK(sc.strength == 0);
  }
  SUBCASE("present count above roster rejects the record") {
    std::vector<RosterEntry> small{{"M1", 1, 1}};
    const std::vector<AttendanceEvent> events{ev("s1", "M1", 1), ev("s2", "M1", 1)};
    const auto r = aggregate(events, std::span<const RosterEntry>(small), 11);
    CHECK(r.records.empty());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].find("exceeds") != std::string::npos);
  }
  SUBCASE("week beyond weeks_total") {
    const std::vector<AttendanceEvent> events{ev("s1", "M1", 12)};
    CHECK_THROWS_WITH(aggregate(events, std::nullopt, 11), doctest::Contains("WeekOutOfRange"));
  }
}

TEST_CASE("aggregate CSV round trip") {
  const std::vector<ModuleScore> rows{score("A", 1, 11, 1, 73.7), score("B", 2, 11, 0, std::nullopt)};
  std::ostringstream os;
  write_scores_csv(os, rows);
  CHECK(os.str() == std::string(kScoresHeader) + "\nA,1,11,1,73.7,0.067,1\nB,2,11,0,,,0\n");
  std::istringstream in(os.str());
  const auto back = read_scores_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(*back[0].sac == doctest::Approx(*rows[0].sac));
  CHECK(back[1].flagged());
}

TEST_CASE("read_scores_csv errors") {
  std::istringstream bad_header("module,semester\n");
  CHECK_THROWS_WITH(read_scores_csv(bad_header), doctest::Contains("MissingHeader"));
  std::istringstream bad_counts("module_code,semester,weeks_total,attendance_taken,attend_avg\nA,1,11,12,50\n");
  CHECK_THROWS_WITH(read_scores_csv(bad_counts), doctest::Contains("InvalidCounts"));
  std::istringstream bad_avg("module_code,semester,weeks_total,attendance_taken,attend_avg\nA,1,11,3,150\n");
  CHECK_THROWS_WITH(read_scores_csv(bad_avg), doctest::Contains("InvalidAverage"));
}

TEST_CASE("parse_roster") {
  std::istringstream ok("module_code,semester,registered\nM1,1,20\nM1,2,18\n");
  CHECK(parse_roster(ok).size() == 2);
  std::istringstream dup("module_code,semester,registered\nM1,1,20\nM1,1,18\n");
  CHECK_THROWS_WITH(parse_roster(dup), doctest::Contains("duplicate"));
  std::istringstream zero("module_code,semester,registered\nM1,1,0\n");
  CHECK_THROWS_AS(parse_roster(zero), Error);
}
