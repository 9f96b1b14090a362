#ifndef SAC_ATTENDANCE_H
#define SAC_ATTENDANCE_H

#include <optional>
#include <string>
#include <vector>

namespace sac {

/// One module-week. When `taken` is false the attendance count is ignored.
struct WeekObservation {
  int week_index = 1;
  int attended = 0;
  int registered = 1;
  bool taken = true;
};

struct ZComponents {
  double z1 = 0.0;  // A / 100, the student-side factor
  double z2 = 0.0;  // C1 / C2, the instructor-side factor
};

/// Nominal credibility class in 1..10. Zero is reserved for "no score"
/// in report output and is never produced by strength_bin().
class SacStrength {
 public:
  explicit SacStrength(int value);
  int value() const noexcept { return value_; }
  friend bool operator==(SacStrength, SacStrength) = default;

 private:
  int value_;
};

/// Per module-semester attendance record. Construction validates the
/// observation list against weeks_total.
class ModuleTermRecord {
 public:
  ModuleTermRecord(std::string module_code, int semester, int weeks_total,
                   std::vector<WeekObservation> observations);

  const std::string& module_code() const noexcept { return module_code_; }
  int semester() const noexcept { return semester_; }
  int weeks_total() const noexcept { return weeks_total_; }
  const std::vector<WeekObservation>& observations() const noexcept { return observations_; }

  int taken_count() const noexcept;
  std::optional<double> attend_avg() const;
  std::optional<double> sac() const;

 private:
  std::string module_code_;
  int semester_;
  int weeks_total_;
  std::vector<WeekObservation> observations_;
};

// Mean over taken weeks of X/Y, as a percentage. Throws NoAttendanceTaken
// when no week was taken.
double attendance_average(const ModuleTermRecord& record);

// (A * C1) / (100 * C2)
double sac(double attend_avg, int taken_count, int weeks_total);

ZComponents z_components(double attend_avg, int taken_count, int weeks_total);

// [0,0.1) -> 1, [0.1,0.2) -> 2, ..., [0.9,1.0] -> 10
SacStrength strength_bin(double sac_value);

}  // namespace sac

#endif  // SAC_ATTENDANCE_H
