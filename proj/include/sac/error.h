#ifndef SAC_ERROR_H
#define SAC_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace sac {

enum class ErrorKind {
  NoAttendanceTaken,
  InvalidCounts,
  InvalidAverage,
  OutOfRange,
  InvalidRecord,
  MissingHeader,
  ParseError,
  WeekOutOfRange,
  TooFewValues,
  DegeneratePanel,
  InvalidPanel,
  EmptyCounts,
  UnknownAttribute,
  BadThreshold,
  EmptyDataset,
  SchemaMismatch,
  MissingValue,
  InvalidFraction,
  InvalidModel,
  InvalidParams,
  InvalidThresholds,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Every domain failure carries the error name so the CLI can surface it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the leading error name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace sac

#endif  // SAC_ERROR_H
