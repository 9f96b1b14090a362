#include "sac/ingest.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "sac/csv.h"
#include "sac/error.h"

namespace sac {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void expect_header(std::istream& in, std::string_view expected, std::size_t& line_no) {
  std::string line;
  if (!csv::next_line(in, line, line_no)) {
    throw Error(ErrorKind::MissingHeader, fmt::format("empty input, expected '{}'", expected));
  }
  std::string joined;
  for (const auto& f : csv::split(line)) {
    if (!joined.empty()) joined += ',';
    joined += f;
  }
  if (joined != expected) {
    throw Error(ErrorKind::MissingHeader,
                fmt::format("line {}: got '{}', expected '{}'", line_no, line, expected));
  }
}

auto event_key(const AttendanceEvent& e) {
  return std::tie(e.module_code, e.semester, e.week_index, e.student_id);
}

std::string format_fixed(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

}  // namespace

EventBatch parse_events(std::istream& in) {
  EventBatch batch;
  std::size_t line_no = 0;
  expect_header(in, kEventsHeader, line_no);

  std::string line;
  while (csv::next_line(in, line, line_no)) {
    ++batch.report.rows_read;
    auto reject = [&](std::string reason) {
      ++batch.report.rows_rejected;
      batch.report.rejections.push_back({line_no, std::move(reason)});
    };

    const auto fields = csv::split(line);
    if (fields.size() != 5) {
      reject(fmt::format("expected 5 fields, got {}", fields.size()));
      continue;
    }
    AttendanceEvent ev;
    ev.student_id = fields[0];
    ev.module_code = fields[1];
    if (ev.student_id.empty() || ev.module_code.empty()) {
      reject("empty student_id or module_code");
      continue;
    }
    long long semester = 0;
    if (!csv::parse_int(fields[2], semester) || (semester != 1 && semester != 2)) {
      reject(fmt::format("bad semester '{}'", fields[2]));
      continue;
    }
    long long week = 0;
    if (!csv::parse_int(fields[3], week) || week < 1 || week > 1'000'000) {
      reject(fmt::format("bad week '{}' (need integer >= 1)", fields[3]));
      continue;
    }
    const auto status = lower(fields[4]);
    if (status == "present") {
      ev.status = AttendanceStatus::present;
    } else if (status == "absent") {
      ev.status = AttendanceStatus::absent;
    } else {
      reject(fmt::format("unknown status '{}'", fields[4]));
      continue;
    }
    ev.semester = static_cast<int>(semester);
    ev.week_index = static_cast<int>(week);
    batch.events.push_back(std::move(ev));
  }
  batch.report.kept = batch.events.size();
  return batch;
}

EventBatch clean_events(std::vector<AttendanceEvent> events) {
  EventBatch batch;
  batch.report.rows_read = events.size();
  // Stable sort keeps the input order inside a key so the survivor of a
  // run of exact duplicates is well defined.
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return event_key(a) < event_key(b); });

  for (std::size_t i = 0; i < events.size();) {
    std::size_t j = i + 1;
    bool any_present = events[i].status == AttendanceStatus::present;
    bool any_absent = !any_present;
    while (j < events.size() && event_key(events[j]) == event_key(events[i])) {
      if (events[j].status == AttendanceStatus::present) {
        any_present = true;
      } else {
        any_absent = true;
      }
      ++j;
    }
    AttendanceEvent kept = std::move(events[i]);
    if (any_present && any_absent) {
      kept.status = AttendanceStatus::present;
      ++batch.report.conflicts_resolved;
    }
    batch.report.duplicates_dropped += j - i - 1;
    batch.events.push_back(std::move(kept));
    i = j;
  }
  batch.report.kept = batch.events.size();
  return batch;
}

CleaningReport combine(const CleaningReport& parsed, const CleaningReport& cleaned) {
  CleaningReport out = parsed;
  out.kept = cleaned.kept;
  out.duplicates_dropped += cleaned.duplicates_dropped;
  out.conflicts_resolved += cleaned.conflicts_resolved;
  out.rows_rejected += cleaned.rows_rejected;
  out.rejections.insert(out.rejections.end(), cleaned.rejections.begin(),
                        cleaned.rejections.end());
  return out;
}

std::vector<RosterEntry> parse_roster(std::istream& in) {
  std::size_t line_no = 0;
  expect_header(in, kRosterHeader, line_no);
  std::vector<RosterEntry> roster;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  while (csv::next_line(in, line, line_no)) {
    const auto fields = csv::split(line);
    long long semester = 0;
    long long registered = 0;
    if (fields.size() != 3 || fields[0].empty() || !csv::parse_int(fields[1], semester) ||
        (semester != 1 && semester != 2) || !csv::parse_int(fields[2], registered) ||
        registered < 1 || registered > 1'000'000'000) {
      throw Error(ErrorKind::ParseError, fmt::format("roster line {}: '{}'", line_no, line));
    }
    if (!seen.emplace(fields[0], static_cast<int>(semester)).second) {
      throw Error(ErrorKind::ParseError,
                  fmt::format("roster line {}: duplicate entry for {} semester {}", line_no,
                              fields[0], semester));
    }
    roster.push_back({fields[0], static_cast<int>(semester), static_cast<int>(registered)});
  }
  return roster;
}

AggregateResult aggregate(std::span<const AttendanceEvent> events,
                          std::optional<std::span<const RosterEntry>> roster, int weeks_total) {
  if (weeks_total < 1) {
    throw Error(ErrorKind::InvalidCounts, fmt::format("weeks_total {} < 1", weeks_total));
  }

  struct ModuleAccum {
    std::map<int, std::pair<int, int>> weeks;  // week -> (present, events)
    std::set<std::string> students;
  };
  using Key = std::pair<std::string, int>;
  std::map<Key, ModuleAccum> modules;

  for (const auto& ev : events) {
    if (ev.week_index < 1 || ev.week_index > weeks_total) {
      throw Error(ErrorKind::WeekOutOfRange,
                  fmt::format("{} semester {} student {}: week {} outside [1,{}]", ev.module_code,
                              ev.semester, ev.student_id, ev.week_index, weeks_total));
    }
    auto& acc = modules[{ev.module_code, ev.semester}];
    auto& [present, count] = acc.weeks[ev.week_index];
    ++count;
    if (ev.status == AttendanceStatus::present) ++present;
    acc.students.insert(ev.student_id);
  }

  std::map<Key, int> registered_by_module;
  if (roster) {
    for (const auto& entry : *roster) {
      registered_by_module[{entry.module_code, entry.semester}] = entry.registered;
      modules.try_emplace({entry.module_code, entry.semester});
    }
  }

  AggregateResult result;
  for (const auto& [key, acc] : modules) {
    const auto& [code, semester] = key;
    int registered = static_cast<int>(acc.students.size());
    if (roster) {
      const auto it = registered_by_module.find(key);
      if (it == registered_by_module.end()) {
        result.diagnostics.push_back(
            fmt::format("{} semester {}: no roster entry", code, semester));
        continue;
      }
      registered = it->second;
    }

    std::vector<WeekObservation> observations;
    observations.reserve(static_cast<std::size_t>(weeks_total));
    std::string overflow;
    for (int week = 1; week <= weeks_total; ++week) {
      WeekObservation obs{week, 0, std::max(registered, 1), false};
      if (const auto it = acc.weeks.find(week); it != acc.weeks.end()) {
        obs.taken = true;
        obs.attended = it->second.first;
        if (obs.attended > registered && overflow.empty()) {
          overflow = fmt::format("{} semester {}: week {} present count {} exceeds registered {}",
                                 code, semester, week, obs.attended, registered);
        }
      }
      observations.push_back(obs);
    }
    if (!overflow.empty()) {
      result.diagnostics.push_back(std::move(overflow));
      continue;
    }
    result.records.emplace_back(code, semester, weeks_total, std::move(observations));
  }
  return result;
}

ModuleScore score(const ModuleTermRecord& record) {
  return score(record.module_code(), record.semester(), record.weeks_total(),
               record.taken_count(), record.attend_avg());
}

ModuleScore score(std::string module_code, int semester, int weeks_total, int taken_count,
                  std::optional<double> attend_avg) {
  ModuleScore row;
  row.module_code = std::move(module_code);
  row.semester = semester;
  row.weeks_total = weeks_total;
  row.taken_count = taken_count;
  if (taken_count >= 1 && attend_avg) {
    row.attend_avg = attend_avg;
    row.sac = sac::sac(*attend_avg, taken_count, weeks_total);
    row.strength = strength_bin(*row.sac).value();
  } else if (taken_count < 0 || taken_count > weeks_total || weeks_total < 1) {
    throw Error(ErrorKind::InvalidCounts,
                fmt::format("{}: attendance_taken={} weeks_total={}", row.module_code,
                            taken_count, weeks_total));
  }
  return row;
}

std::vector<ModuleScore> read_scores_csv(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  if (!csv::next_line(in, line, line_no)) {
    throw Error(ErrorKind::MissingHeader, "empty aggregate input");
  }
  const auto header = csv::split(line);
  const auto expected = csv::split(kScoresHeader);
  if (header.size() < 5 || header.size() > expected.size() ||
      !std::equal(header.begin(), header.end(), expected.begin())) {
    throw Error(ErrorKind::MissingHeader,
                fmt::format("line {}: got '{}', expected '{}' (sac columns optional)", line_no,
                            line, kScoresHeader));
  }

  std::vector<ModuleScore> rows;
  while (csv::next_line(in, line, line_no)) {
    const auto f = csv::split(line);
    long long semester = 0;
    long long weeks = 0;
    long long taken = 0;
    if (f.size() != header.size() || f[0].empty() || !csv::parse_int(f[1], semester) ||
        (semester != 1 && semester != 2) || !csv::parse_int(f[2], weeks) ||
        !csv::parse_int(f[3], taken) || weeks > 1'000'000 || taken > 1'000'000) {
      throw Error(ErrorKind::ParseError, fmt::format("aggregate line {}: '{}'", line_no, line));
    }
    std::optional<double> avg;
    if (!f[4].empty()) {
      double v = 0.0;
      if (!csv::parse_double(f[4], v)) {
        throw Error(ErrorKind::ParseError,
                    fmt::format("aggregate line {}: bad attend_avg '{}'", line_no, f[4]));
      }
      avg = v;
    } else if (taken > 0) {
      throw Error(ErrorKind::MissingValue,
                  fmt::format("aggregate line {}: attend_avg empty but attendance_taken={}",
                              line_no, taken));
    }
    try {
      rows.push_back(score(f[0], static_cast<int>(semester), static_cast<int>(weeks),
                           static_cast<int>(taken), avg));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("aggregate line {}: {}", line_no, e.detail()));
    }
  }
  return rows;
}

void write_scores_csv(std::ostream& out, std::span<const ModuleScore> rows) {
  out << kScoresHeader << '\n';
  for (const auto& r : rows) {
    out << r.module_code << ',' << r.semester << ',' << r.weeks_total << ',' << r.taken_count
        << ',' << (r.attend_avg ? format_fixed(*r.attend_avg, 1) : "") << ','
        << (r.sac ? format_fixed(*r.sac, 3) : "") << ',' << r.strength << '\n';
  }
}

}  // namespace sac
