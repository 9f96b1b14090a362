#include "sac/attendance.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "sac/error.h"

namespace sac {
namespace {

void check_inputs(double attend_avg, int taken_count, int weeks_total) {
  if (weeks_total < 1 || taken_count < 1 || taken_count > weeks_total) {
    throw Error(ErrorKind::InvalidCounts,
                fmt::format("taken_count={} weeks_total={} (need 1 <= C1 <= C2)", taken_count,
                            weeks_total));
  }
  if (!(attend_avg >= 0.0 && attend_avg <= 100.0)) {
    throw Error(ErrorKind::InvalidAverage,
                fmt::format("attend_avg={} outside [0,100]", attend_avg));
  }
}

}  // namespace

SacStrength::SacStrength(int value) : value_(value) {
  if (value < 1 || value > 10) {
    throw Error(ErrorKind::OutOfRange, fmt::format("strength {} outside 1..10", value));
  }
}

ModuleTermRecord::ModuleTermRecord(std::string module_code, int semester, int weeks_total,
                                   std::vector<WeekObservation> observations)
    : module_code_(std::move(module_code)),
      semester_(semester),
      weeks_total_(weeks_total),
      observations_(std::move(observations)) {
  if (semester_ != 1 && semester_ != 2) {
    throw Error(ErrorKind::InvalidRecord,
                fmt::format("{}: semester {} not in {{1,2}}", module_code_, semester_));
  }
  if (weeks_total_ < 1) {
    throw Error(ErrorKind::InvalidRecord,
                fmt::format("{}: weeks_total {} < 1", module_code_, weeks_total_));
  }
  std::sort(observations_.begin(), observations_.end(),
            [](const auto& a, const auto& b) { return a.week_index < b.week_index; });
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const auto& obs = observations_[i];
    if (obs.week_index < 1 || obs.week_index > weeks_total_) {
      throw Error(ErrorKind::WeekOutOfRange,
                  fmt::format("{}: week {} outside [1,{}]", module_code_, obs.week_index,
                              weeks_total_));
    }
    if (i > 0 && observations_[i - 1].week_index == obs.week_index) {
      throw Error(ErrorKind::InvalidRecord,
                  fmt::format("{}: duplicate week {}", module_code_, obs.week_index));
    }
    if (obs.registered < 1) {
      throw Error(ErrorKind::InvalidRecord,
                  fmt::format("{}: week {} registered count {} < 1", module_code_,
                              obs.week_index, obs.registered));
    }
    if (obs.taken && (obs.attended < 0 || obs.attended > obs.registered)) {
      throw Error(ErrorKind::InvalidRecord,
                  fmt::format("{}: week {} attended {} not in [0,{}]", module_code_,
                              obs.week_index, obs.attended, obs.registered));
    }
  }
}

int ModuleTermRecord::taken_count() const noexcept {
  return static_cast<int>(std::count_if(observations_.begin(), observations_.end(),
                                        [](const auto& o) { return o.taken; }));
}

std::optional<double> ModuleTermRecord::attend_avg() const {
  if (taken_count() == 0) return std::nullopt;
  return attendance_average(*this);
}

std::optional<double> ModuleTermRecord::sac() const {
  const int taken = taken_count();
  if (taken == 0) return std::nullopt;
  return sac::sac(attendance_average(*this), taken, weeks_total_);
}

double attendance_average(const ModuleTermRecord& record) {
  double ratio_sum = 0.0;
  int taken = 0;
  for (const auto& obs : record.observations()) {
    if (!obs.taken) continue;
    ratio_sum += static_cast<double>(obs.attended) / static_cast<double>(obs.registered);
    ++taken;
  }
  if (taken == 0) {
    throw Error(ErrorKind::NoAttendanceTaken,
                fmt::format("{} semester {}: attendance never taken", record.module_code(),
                            record.semester()));
  }
  return std::clamp(100.0 * ratio_sum / taken, 0.0, 100.0);
}

double sac(double attend_avg, int taken_count, int weeks_total) {
  check_inputs(attend_avg, taken_count, weeks_total);
  return (attend_avg * taken_count) / (100.0 * weeks_total);
}

ZComponents z_components(double attend_avg, int taken_count, int weeks_total) {
  check_inputs(attend_avg, taken_count, weeks_total);
  return {attend_avg / 100.0,
          static_cast<double>(taken_count) / static_cast<double>(weeks_total)};
}

SacStrength strength_bin(double sac_value) {
  if (!(sac_value >= 0.0 && sac_value <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, fmt::format("sac {} outside [0,1]", sac_value));
  }
  // Boundary k/10 opens class k+1 (left-closed intervals).
  int cls = 1;
  for (int k = 1; k <= 9; ++k) {
    if (sac_value >= static_cast<double>(k) / 10.0) cls = k + 1;
  }
  return SacStrength(cls);
}

}  // namespace sac
