#include "sac/reliability.h"

#include <set>
#include <utility>

#include <fmt/format.h>

#include "sac/csv.h"

namespace sac {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::population: return "population";
    case Estimator::sample: return "sample";
    case Estimator::paper_mixed: return "paper-mixed";
  }
  return "population";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "population") return Estimator::population;
  if (name == "sample") return Estimator::sample;
  if (name == "paper-mixed") return Estimator::paper_mixed;
  throw Error(ErrorKind::InvalidParams, fmt::format("unknown estimator '{}'", name));
}

SacPanel::SacPanel(std::vector<std::string> module_codes, std::vector<std::string> year_labels,
                   Eigen::MatrixXd values)
    : module_codes_(std::move(module_codes)),
      year_labels_(std::move(year_labels)),
      values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw Error(ErrorKind::InvalidPanel,
                fmt::format("panel is {}x{}, need at least 2 modules and 2 years", values_.rows(),
                            values_.cols()));
  }
  if (static_cast<Eigen::Index>(module_codes_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(year_labels_.size()) != values_.cols()) {
    throw Error(ErrorKind::InvalidPanel, "label counts do not match matrix shape");
  }
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
      const double v = values_(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::InvalidPanel,
                    fmt::format("{} / {}: value {} outside [0,1]", module_codes_[r],
                                year_labels_[c], v));
      }
    }
  }
}

AlphaBreakdown cronbach_alpha(const SacPanel& panel, Estimator estimator) {
  const auto& x = panel.values();
  const Variance item_kind =
      estimator == Estimator::population ? Variance::population : Variance::sample;
  const Variance total_kind =
      estimator == Estimator::sample ? Variance::sample : Variance::population;

  AlphaBreakdown out;
  out.estimator = estimator;
  out.k = static_cast<int>(x.cols());
  out.m = static_cast<int>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double v = column_variance(x.col(c), item_kind);
    out.per_item_variance.push_back(v);
    out.sum_item_variance += v;
  }

  Eigen::VectorXd totals(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double t = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) t += x(r, c);
    totals(r) = t;
  }
  out.total_score_variance = column_variance(totals, total_kind);
  // Equal totals can still leave rounding residue in the variance.
  if (out.total_score_variance == 0.0 || totals.maxCoeff() == totals.minCoeff()) {
    throw Error(ErrorKind::DegeneratePanel,
                "every module has the same total score; alpha is undefined");
  }
  const double k = out.k;
  out.alpha = (k / (k - 1.0)) * (1.0 - out.sum_item_variance / out.total_score_variance);
  return out;
}

SacPanel read_panel_csv(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  if (!csv::next_line(in, line, line_no)) throw Error(ErrorKind::MissingHeader, "empty panel");
  auto header = csv::split(line);
  if (header.empty() || header[0] != "module_code") {
    throw Error(ErrorKind::MissingHeader,
                fmt::format("line {}: panel header must start with module_code", line_no));
  }
  std::vector<std::string> years(header.begin() + 1, header.end());
  for (const auto& y : years) {
    if (y.empty()) throw Error(ErrorKind::MissingHeader, "empty year label in panel header");
  }

  std::vector<std::string> codes;
  std::vector<std::vector<double>> rows;
  std::set<std::string> seen;
  while (csv::next_line(in, line, line_no)) {
    const auto f = csv::split(line);
    if (f.size() != header.size() || f[0].empty()) {
      throw Error(ErrorKind::InvalidPanel,
                  fmt::format("line {}: expected {} fields, got {}", line_no, header.size(),
                              f.size()));
    }
    if (!seen.insert(f[0]).second) {
      throw Error(ErrorKind::InvalidPanel,
                  fmt::format("line {}: duplicate module {}", line_no, f[0]));
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = 0.0;
      if (!csv::parse_double(f[i], v)) {
        throw Error(f[i].empty() ? ErrorKind::MissingValue : ErrorKind::ParseError,
                    fmt::format("line {}: bad value '{}' for {}", line_no, f[i], header[i]));
      }
      row.push_back(v);
    }
    codes.push_back(f[0]);
    rows.push_back(std::move(row));
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(years.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < years.size(); ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return SacPanel(std::move(codes), std::move(years), std::move(values));
}

nlohmann::ordered_json to_json(const AlphaBreakdown& b) {
  nlohmann::ordered_json j;
  j["per_item_variance"] = b.per_item_variance;
  j["sum_item_variance"] = b.sum_item_variance;
  j["total_score_variance"] = b.total_score_variance;
  j["alpha"] = b.alpha;
  j["estimator"] = std::string(to_string(b.estimator));
  j["k"] = b.k;
  j["m"] = b.m;
  return j;
}

}  // namespace sac
