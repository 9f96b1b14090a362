#ifndef SAC_DTREE_H
#define SAC_DTREE_H

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "sac/error.h"

namespace sac::dtree {

enum class AttributeKind { numeric, nominal };

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> domain;  // nominal only, declaration order

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

/// Input attributes plus a nominal class attribute. Declaration order is
/// significant: it breaks scoring ties and orders the class domain.
class Schema {
 public:
  Schema(std::vector<AttributeSpec> attributes, AttributeSpec label);

  const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
  const AttributeSpec& label() const noexcept { return label_; }
  std::size_t arity() const noexcept { return attributes_.size(); }
  std::size_t class_count() const noexcept { return label_.domain.size(); }

  std::size_t index_of(std::string_view name) const;
  std::size_t class_index(std::string_view value) const;
  std::size_t nominal_index(std::size_t attribute, std::string_view value) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<AttributeSpec> attributes_;
  AttributeSpec label_;
};

/// Nominal values are stored as their domain index.
struct Instance {
  std::vector<double> values;
  std::size_t label = 0;
};

class Dataset {
 public:
  explicit Dataset(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<Instance>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const Instance& operator[](std::size_t i) const { return rows_[i]; }

  // Throws SchemaMismatch for wrong arity or out-of-domain values.
  void add(Instance instance);

  std::vector<double> class_counts() const;

 private:
  Schema schema_;
  std::vector<Instance> rows_;
};

void validate(const Schema& schema, const Instance& instance);

enum class Criterion { gain, gain_ratio };

std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);

/// Shannon entropy in bits of a count vector, 0 log 0 = 0.
template <typename Counts>
double entropy(const Counts& counts) {
  double total = 0.0;
  for (const auto c : counts) {
    if (c < 0) throw Error(ErrorKind::InvalidParams, "negative class count");
    total += static_cast<double>(c);
  }
  if (total <= 0.0) throw Error(ErrorKind::EmptyCounts, "entropy of an empty count vector");
  double h = 0.0;
  for (const auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

// `threshold` must be given for numeric attributes and omitted for nominal
// ones (BadThreshold otherwise). Numeric branches are value <= t, value > t.
double info_gain(const Dataset& data, std::size_t attribute, std::optional<double> threshold = {});
double gain_ratio(const Dataset& data, std::size_t attribute,
                  std::optional<double> threshold = {});

struct AttributeScore {
  std::size_t attribute = 0;
  std::string name;
  double score = 0.0;
  std::optional<double> threshold;  // best cut for numeric attributes
};

// Candidate cuts: midpoints between adjacent distinct values, except where
// both neighbouring value groups hold one and the same class.
std::vector<double> candidate_thresholds(const Dataset& data, std::size_t attribute);

std::vector<AttributeScore> rank_attributes(const Dataset& data, Criterion criterion);

/// Either a leaf (children empty) or a split. Numeric splits have two
/// children (<= threshold, > threshold); nominal splits one per domain value.
struct TreeNode {
  std::optional<std::size_t> attribute;
  double threshold = 0.0;
  std::vector<TreeNode> children;

  std::size_t label = 0;
  std::vector<double> class_counts;  // training instances reaching this node
  std::vector<double> distribution;

  bool is_leaf() const noexcept { return children.empty(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree(Schema schema, TreeNode root);

  const Schema& schema() const noexcept { return schema_; }
  const TreeNode& root() const noexcept { return root_; }

  std::size_t leaf_count() const;
  std::size_t size() const;  // all nodes
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  Schema schema_;
  TreeNode root_;
};

struct BuildParams {
  Criterion criterion = Criterion::gain_ratio;
  int min_leaf = 2;
  std::optional<int> max_depth;
};

DecisionTree build_tree(const Dataset& data, const BuildParams& params = {});

struct Prediction {
  std::size_t label = 0;
  std::vector<double> distribution;
};

Prediction predict(const DecisionTree& tree, const Instance& instance);

struct Condition {
  enum class Op { le, gt, eq };
  std::size_t attribute = 0;
  Op op = Op::le;
  double value = 0.0;  // threshold, or domain index for eq

  bool holds(const Instance& instance) const;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Rule {
  std::vector<Condition> conditions;
  std::size_t label = 0;
  std::size_t coverage = 0;
  double confidence = 0.0;

  bool matches(const Instance& instance) const;
};

struct RuleSet {
  Schema schema;
  std::vector<Rule> rules;

  // Label of the first matching rule.
  std::optional<std::size_t> classify(const Instance& instance) const;
  // "If attend_avg > 88.9 then SAC_Strength = 10"
  std::string render(const Rule& rule) const;
  std::vector<std::string> render() const;
};

RuleSet extract_rules(const DecisionTree& tree);

struct EvalReport {
  double accuracy = 0.0;
  double rmse = 0.0;
  Eigen::MatrixXi confusion;  // rows: true class, cols: predicted class
  std::size_t instances = 0;
};

EvalReport evaluate(const DecisionTree& tree, const Dataset& test);

// Stratified, seeded. |train| = round(N * train_fraction).
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

// Serialization. Doubles are written in shortest round-trip form so
// from_json(to_json(t)) == t bit for bit.
nlohmann::ordered_json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const DecisionTree& tree);
DecisionTree tree_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const RuleSet& rules);
nlohmann::ordered_json to_json(const EvalReport& report, const Schema& schema);

// Dataset CSV: header names columns; columns are matched to the schema by
// name and unlisted columns are ignored. With label_required false a
// missing label column is allowed and every label reads as class 0.
Dataset read_dataset_csv(std::istream& in, const Schema& schema, bool label_required = true);
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace sac::dtree

#endif  // SAC_DTREE_H
