#ifndef SAC_INGEST_H
#define SAC_INGEST_H

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sac/attendance.h"

namespace sac {

enum class AttendanceStatus { present, absent };

struct AttendanceEvent {
  std::string student_id;
  std::string module_code;
  int semester = 1;
  int week_index = 1;
  AttendanceStatus status = AttendanceStatus::present;

  friend bool operator==(const AttendanceEvent&, const AttendanceEvent&) = default;
};

struct RosterEntry {
  std::string module_code;
  int semester = 1;
  int registered = 1;
};

struct Rejection {
  std::size_t line = 0;  // 1-based physical line in the source file
  std::string reason;
};

/// Accounting for one ingest pass. rows_read == kept + duplicates_dropped +
/// rows_rejected always holds. Conflicting duplicates are counted in both
/// duplicates_dropped and conflicts_resolved.
struct CleaningReport {
  std::size_t rows_read = 0;
  std::size_t kept = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t conflicts_resolved = 0;
  std::size_t rows_rejected = 0;
  std::vector<Rejection> rejections;
};

struct EventBatch {
  std::vector<AttendanceEvent> events;
  CleaningReport report;
};

inline constexpr std::string_view kEventsHeader = "student_id,module_code,semester,week,status";
inline constexpr std::string_view kRosterHeader = "module_code,semester,registered";
inline constexpr std::string_view kScoresHeader =
    "module_code,semester,weeks_total,attendance_taken,attend_avg,sac,sac_strength";

EventBatch parse_events(std::istream& in);

// At most one event per (student, module, semester, week); present beats
// absent. Output sorted by module, semester, week, student.
EventBatch clean_events(std::vector<AttendanceEvent> events);

// Folds the clean pass counters into the parse report.
CleaningReport combine(const CleaningReport& parsed, const CleaningReport& cleaned);

std::vector<RosterEntry> parse_roster(std::istream& in);

struct AggregateResult {
  std::vector<ModuleTermRecord> records;  // sorted by module, semester
  std::vector<std::string> diagnostics;   // rejected records, one line each
};

AggregateResult aggregate(std::span<const AttendanceEvent> events,
                          std::optional<std::span<const RosterEntry>> roster, int weeks_total);

/// One row of the aggregate CSV. A record with no taken weeks has no
/// attend_avg/sac and strength 0.
struct ModuleScore {
  std::string module_code;
  int semester = 1;
  int weeks_total = 1;
  int taken_count = 0;
  std::optional<double> attend_avg;
  std::optional<double> sac;
  int strength = 0;

  bool flagged() const noexcept { return !sac.has_value(); }
};

ModuleScore score(const ModuleTermRecord& record);
ModuleScore score(std::string module_code, int semester, int weeks_total, int taken_count,
                  std::optional<double> attend_avg);

// Reads the aggregate CSV and recomputes sac/strength from the
// weeks_total, attendance_taken and attend_avg columns. The sac and
// sac_strength columns may be absent or empty.
std::vector<ModuleScore> read_scores_csv(std::istream& in);
void write_scores_csv(std::ostream& out, std::span<const ModuleScore> rows);

}  // namespace sac

#endif  // SAC_INGEST_H
