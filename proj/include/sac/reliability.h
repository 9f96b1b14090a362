#ifndef SAC_RELIABILITY_H
#define SAC_RELIABILITY_H

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "sac/error.h"

namespace sac {

enum class Variance { population, sample };

/// How item (per-year) and total-score variances are estimated.
/// paper_mixed uses sample variance for items and population variance for
/// the totals; it reproduces the published Table II numbers and nothing else.
enum class Estimator { population, sample, paper_mixed };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

/// Modules (rows) x years (columns) of SAC values.
class SacPanel {
 public:
  SacPanel(std::vector<std::string> module_codes, std::vector<std::string> year_labels,
           Eigen::MatrixXd values);

  const std::vector<std::string>& module_codes() const noexcept { return module_codes_; }
  const std::vector<std::string>& year_labels() const noexcept { return year_labels_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index modules() const noexcept { return values_.rows(); }
  Eigen::Index years() const noexcept { return values_.cols(); }

 private:
  std::vector<std::string> module_codes_;
  std::vector<std::string> year_labels_;
  Eigen::MatrixXd values_;
};

struct AlphaBreakdown {
  std::vector<double> per_item_variance;
  double sum_item_variance = 0.0;
  double total_score_variance = 0.0;
  double alpha = 0.0;
  Estimator estimator = Estimator::population;
  int k = 0;
  int m = 0;
};

/// Variance of a vector expression, summed left to right.
template <typename Derived>
typename Derived::Scalar column_variance(const Eigen::MatrixBase<Derived>& values,
                                         Variance kind) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::IsVectorAtCompileTime || Derived::ColsAtCompileTime == Eigen::Dynamic,
                "column_variance expects a vector");
  const Eigen::Index n = values.size();
  if (n < 2) throw Error(ErrorKind::TooFewValues, "variance needs at least two values");
  Scalar mean(0);
  for (Eigen::Index i = 0; i < n; ++i) mean += values(i);
  mean /= static_cast<Scalar>(n);
  Scalar ss(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar d = values(i) - mean;
    ss += d * d;
  }
  return ss / static_cast<Scalar>(kind == Variance::sample ? n - 1 : n);
}

inline double column_variance(const std::vector<double>& values, Variance kind) {
  return column_variance(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                           static_cast<Eigen::Index>(values.size())),
                         kind);
}

// Items are years (columns), subjects are modules (rows).
AlphaBreakdown cronbach_alpha(const SacPanel& panel, Estimator estimator);

// Header: module_code,<year1>,<year2>,...
SacPanel read_panel_csv(std::istream& in);

nlohmann::ordered_json to_json(const AlphaBreakdown& breakdown);

}  // namespace sac

#endif  // SAC_RELIABILITY_H
