#ifndef SAC_SYNTHGEN_H
#define SAC_SYNTHGEN_H

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sac/dtree.h"

namespace sac::synth {

/// Parameters for synthetic attendance logs. Each module draws its
/// registered count, taking probability q and attendance probability p
/// uniformly from the given ranges.
struct GenParams {
  int module_count = 12;
  int weeks_total = 11;
  int registered_lo = 15;
  int registered_hi = 60;
  double attend_lo = 0.3;
  double attend_hi = 1.0;
  double take_lo = 0.1;
  double take_hi = 1.0;
  std::uint64_t seed = 1;
};

void validate(const GenParams& params);

// Events CSV in the ingest format, rows sorted by module, semester, week,
// student. Identical params give identical bytes.
std::string generate_events(const GenParams& params);

inline constexpr double kDefaultMargin = 0.5;

// The step thresholds of the published rule table.
inline const std::vector<double> kRuleTableThresholds{88.9, 79.6, 69.2, 59.8, 47.5};

// Label for attend_avg under strictly decreasing thresholds: above the
// first threshold is class 10, each lower band one class less.
int step_class(std::span<const double> thresholds, double attend_avg);

// Schema: attend_avg (numeric), attend_taken (numeric, 1..11 noise),
// sem_no (nominal {1,2}, noise); label SAC_Strength with domain 1..10.
dtree::Schema rule_dataset_schema();

// n instances whose attend_avg keeps `margin` away from every threshold.
// For n >= 2 * thresholds + classes, every threshold gets one instance
// within margin + 0.5 on each side and every class at least two instances.
dtree::Dataset generate_rule_labeled_dataset(std::span<const double> thresholds, std::size_t n,
                                             std::uint64_t seed, double margin = kDefaultMargin);

}  // namespace sac::synth

#endif  // SAC_SYNTHGEN_H
