#include "sac/synthgen.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sac/error.h"
#include "sac/ingest.h"
#include "sac/random.h"

namespace sac::synth {
namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void check_thresholds(std::span<const double> thresholds, double margin) {
  if (thresholds.empty() || thresholds.size() > 9) {
    throw Error(ErrorKind::InvalidThresholds,
                fmt::format("need 1..9 thresholds, got {}", thresholds.size()));
  }
  if (!(margin >= 0.0)) throw Error(ErrorKind::InvalidThresholds, "margin must be >= 0");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const double t = thresholds[i];
    if (!(t > 0.0 && t < 100.0)) {
      throw Error(ErrorKind::InvalidThresholds, fmt::format("threshold {} not in (0,100)", t));
    }
    if (i > 0 && !(thresholds[i - 1] > t)) {
      throw Error(ErrorKind::InvalidThresholds, "thresholds must be strictly decreasing");
    }
  }
}

// Allowed attend_avg intervals: [0,100] minus (t - margin, t + margin).
std::vector<std::pair<double, double>> allowed_intervals(std::span<const double> thresholds,
                                                         double margin) {
  std::vector<std::pair<double, double>> out;
  double hi = 100.0;
  for (double t : thresholds) {
    const double lo = t + margin;
    if (lo < hi) out.emplace_back(lo, hi);
    hi = t - margin;
  }
  if (hi > 0.0) out.emplace_back(0.0, hi);
  return out;  // descending order: class 10 band first
}

double sample_from(Rng& rng, const std::vector<std::pair<double, double>>& intervals) {
  double total = 0.0;
  for (const auto& [lo, hi] : intervals) total += hi - lo;
  double u = rng.uniform(0.0, total);
  for (const auto& [lo, hi] : intervals) {
    if (u < hi - lo) return lo + u;
    u -= hi - lo;
  }
  return intervals.back().second;
}

}  // namespace

void validate(const GenParams& p) {
  if (p.module_count < 1 || p.module_count > 9999) {
    throw Error(ErrorKind::InvalidParams, fmt::format("module_count {} not in 1..9999", p.module_count));
  }
  if (p.weeks_total < 1 || p.weeks_total > 99) {
    throw Error(ErrorKind::InvalidParams, fmt::format("weeks_total {} not in 1..99", p.weeks_total));
  }
  if (p.registered_lo < 1 || p.registered_hi < p.registered_lo || p.registered_hi > 99999) {
    throw Error(ErrorKind::InvalidParams,
                fmt::format("registered range [{},{}] invalid", p.registered_lo, p.registered_hi));
  }
  if (!in_unit(p.attend_lo) || !in_unit(p.attend_hi) || p.attend_hi < p.attend_lo ||
      !in_unit(p.take_lo) || !in_unit(p.take_hi) || p.take_hi < p.take_lo) {
    throw Error(ErrorKind::InvalidParams, "probability ranges must be ordered within [0,1]");
  }
}

std::string generate_events(const GenParams& p) {
  validate(p);
  Rng rng(p.seed);
  std::string out(kEventsHeader);
  out += '\n';
  for (int m = 1; m <= p.module_count; ++m) {
    const auto code = fmt::format("MOD{:04d}", m);
    const int semester = 1 + (m - 1) % 2;
    const auto registered = static_cast<int>(rng.uniform_int(p.registered_lo, p.registered_hi));
    const double q = rng.uniform(p.take_lo, p.take_hi);
    const double prob = rng.uniform(p.attend_lo, p.attend_hi);
    for (int week = 1; week <= p.weeks_total; ++week) {
      if (!rng.bernoulli(q)) continue;
      for (int s = 1; s <= registered; ++s) {
        const bool present = rng.bernoulli(prob);
        out += fmt::format("{}-S{:05d},{},{},{},{}\n", code, s, code, semester, week,
                           present ? "present" : "absent");
      }
    }
  }
  return out;
}

int step_class(std::span<const double> thresholds, double attend_avg) {
  int cls = 10;
  for (double t : thresholds) {
    if (attend_avg > t) return cls;
    --cls;
  }
  return cls;
}

dtree::Schema rule_dataset_schema() {
  using dtree::AttributeKind;
  std::vector<std::string> classes;
  for (int c = 1; c <= 10; ++c) classes.push_back(std::to_string(c));
  return dtree::Schema({{"attend_avg", AttributeKind::numeric, {}},
                        {"attend_taken", AttributeKind::numeric, {}},
                        {"sem_no", AttributeKind::nominal, {"1", "2"}}},
                       {"SAC_Strength", AttributeKind::nominal, classes});
}

dtree::Dataset generate_rule_labeled_dataset(std::span<const double> thresholds, std::size_t n,
                                             std::uint64_t seed, double margin) {
  check_thresholds(thresholds, margin);
  const auto bands = allowed_intervals(thresholds, margin);
  if (bands.empty()) throw Error(ErrorKind::InvalidThresholds, "margin leaves no room to sample");

  Rng rng(seed);
  std::vector<double> avgs;
  avgs.reserve(n);
  const std::size_t classes = thresholds.size() + 1;
  if (n >= 2 * thresholds.size() + classes) {
    // One instance hugging each side of every threshold.
    auto clear = [&](double a) {
      return a >= 0.0 && a <= 100.0 &&
             std::none_of(thresholds.begin(), thresholds.end(),
                          [&](double t) { return std::abs(a - t) < margin; });
    };
    for (double t : thresholds) {
      for (double side : {1.0, -1.0}) {
        const double a = t + side * (margin + rng.uniform(0.0, 0.5));
        avgs.push_back(clear(a) ? a : sample_from(rng, bands));
      }
    }
    // One more inside every class band.
    for (const auto& [lo, hi] : bands) avgs.push_back(rng.uniform(lo, hi));
  }
  while (avgs.size() < n) avgs.push_back(sample_from(rng, bands));
  rng.shuffle(std::span<double>(avgs));

  auto schema = rule_dataset_schema();
  dtree::Dataset data(schema);
  for (double a : avgs) {
    dtree::Instance inst;
    inst.values = {a, static_cast<double>(rng.uniform_int(1, 11)),
                   static_cast<double>(rng.uniform_int(0, 1))};
    inst.label = schema.class_index(std::to_string(step_class(thresholds, a)));
    data.add(std::move(inst));
  }
  return data;
}

}  // namespace sac::synth
