#include "sac/error.h"

namespace sac {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoAttendanceTaken: return "NoAttendanceTaken";
    case ErrorKind::InvalidCounts: return "InvalidCounts";
    case ErrorKind::InvalidAverage: return "InvalidAverage";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidRecord: return "InvalidRecord";
    case ErrorKind::MissingHeader: return "MissingHeader";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::WeekOutOfRange: return "WeekOutOfRange";
    case ErrorKind::TooFewValues: return "TooFewValues";
    case ErrorKind::DegeneratePanel: return "DegeneratePanel";
    case ErrorKind::InvalidPanel: return "InvalidPanel";
    case ErrorKind::EmptyCounts: return "EmptyCounts";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::BadThreshold: return "BadThreshold";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::MissingValue: return "MissingValue";
    case ErrorKind::InvalidFraction: return "InvalidFraction";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::InvalidThresholds: return "InvalidThresholds";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sac
