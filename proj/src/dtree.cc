#include "sac/dtree.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "sac/random.h"

namespace sac::dtree {
namespace {

// Gains at or below this are rounding noise, not information.
constexpr double kMinGain = 1e-12;

using BranchCounts = std::vector<std::vector<double>>;

struct SplitScore {
  double gain = 0.0;
  double split_info = 0.0;
};

SplitScore score_branches(const std::vector<double>& parent, const BranchCounts& branches) {
  const double n = std::accumulate(parent.begin(), parent.end(), 0.0);
  double conditional = 0.0;
  std::vector<double> sizes;
  sizes.reserve(branches.size());
  for (const auto& b : branches) {
    const double nb = std::accumulate(b.begin(), b.end(), 0.0);
    sizes.push_back(nb);
    if (nb > 0.0) conditional += (nb / n) * entropy(b);
  }
  SplitScore s;
  s.gain = std::max(0.0, entropy(parent) - conditional);
  s.split_info = entropy(sizes);
  return s;
}

double criterion_value(const SplitScore& s, Criterion c) {
  if (s.gain <= kMinGain) return 0.0;
  if (c == Criterion::gain) return s.gain;
  return s.split_info > 0.0 ? s.gain / s.split_info : 0.0;
}

std::size_t majority(const std::vector<double>& counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

void check_attribute(const Schema& schema, std::size_t attribute) {
  if (attribute >= schema.arity()) {
    throw Error(ErrorKind::UnknownAttribute,
                fmt::format("attribute index {} (schema has {})", attribute, schema.arity()));
  }
}

BranchCounts partition_counts(const Dataset& data, std::size_t attribute,
                              std::optional<double> threshold) {
  const auto& spec = data.schema().attributes()[attribute];
  const std::size_t k = data.schema().class_count();
  if (spec.kind == AttributeKind::numeric) {
    if (!threshold) {
      throw Error(ErrorKind::BadThreshold,
                  fmt::format("numeric attribute {} needs a threshold", spec.name));
    }
    BranchCounts b(2, std::vector<double>(k, 0.0));
    for (const auto& row : data.rows()) b[row.values[attribute] <= *threshold ? 0 : 1][row.label] += 1;
    return b;
  }
  if (threshold) {
    throw Error(ErrorKind::BadThreshold,
                fmt::format("nominal attribute {} takes no threshold", spec.name));
  }
  BranchCounts b(spec.domain.size(), std::vector<double>(k, 0.0));
  for (const auto& row : data.rows()) {
    b[static_cast<std::size_t>(row.values[attribute])][row.label] += 1;
  }
  return b;
}

SplitScore score_split(const Dataset& data, std::size_t attribute,
                       std::optional<double> threshold) {
  check_attribute(data.schema(), attribute);
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "information gain of an empty dataset");
  return score_branches(data.class_counts(), partition_counts(data, attribute, threshold));
}

// Runs of equal values in `sorted` (indices ordered by the attribute).
struct ValueGroup {
  double value;
  std::size_t end;  // one past the last index of the run
  std::optional<std::size_t> sole_class;
};

std::vector<ValueGroup> value_groups(const Dataset& data, const std::vector<std::size_t>& sorted,
                                     std::size_t attribute) {
  std::vector<ValueGroup> groups;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& row = data[sorted[i]];
    const double v = row.values[attribute];
    if (groups.empty() || groups.back().value != v) {
      groups.push_back({v, i + 1, row.label});
    } else {
      auto& g = groups.back();
      g.end = i + 1;
      if (g.sole_class && *g.sole_class != row.label) g.sole_class.reset();
    }
  }
  return groups;
}

bool is_boundary(const ValueGroup& a, const ValueGroup& b) {
  return !(a.sole_class && b.sole_class && *a.sole_class == *b.sole_class);
}

std::vector<std::size_t> sorted_by(const Dataset& data, std::vector<std::size_t> idx,
                                   std::size_t attribute) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double va = data[a].values[attribute];
    const double vb = data[b].values[attribute];
    return va < vb || (va == vb && a < b);
  });
  return idx;
}

class Builder {
 public:
  Builder(const Dataset& data, const BuildParams& params) : data_(data), params_(params) {}

  TreeNode grow(const std::vector<std::size_t>& idx, int depth) const {
    const auto& schema = data_.schema();
    const std::size_t k = schema.class_count();
    TreeNode node;
    node.class_counts.assign(k, 0.0);
    for (auto i : idx) node.class_counts[data_[i].label] += 1;
    const double n = static_cast<double>(idx.size());
    node.distribution.resize(k);
    for (std::size_t c = 0; c < k; ++c) node.distribution[c] = node.class_counts[c] / n;
    node.label = majority(node.class_counts);

    const auto nonzero = std::count_if(node.class_counts.begin(), node.class_counts.end(),
                                       [](double c) { return c > 0.0; });
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf);
    if (nonzero <= 1 || idx.size() < 2 * min_leaf ||
        (params_.max_depth && depth >= *params_.max_depth)) {
      return node;
    }

    struct Best {
      double score = 0.0;
      std::optional<std::size_t> attribute;
      double threshold = 0.0;
    } best;

    for (std::size_t a = 0; a < schema.arity(); ++a) {
      const auto& spec = schema.attributes()[a];
      if (spec.kind == AttributeKind::numeric) {
        const auto sorted = sorted_by(data_, idx, a);
        const auto groups = value_groups(data_, sorted, a);
        std::vector<double> left(k, 0.0);
        std::size_t pos = 0;
        for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
          for (; pos < groups[g].end; ++pos) left[data_[sorted[pos]].label] += 1;
          if (!is_boundary(groups[g], groups[g + 1])) continue;
          const std::size_t n_left = groups[g].end;
          if (n_left < min_leaf || idx.size() - n_left < min_leaf) continue;
          BranchCounts branches{left, node.class_counts};
          for (std::size_t c = 0; c < k; ++c) branches[1][c] -= left[c];
          const double s =
              criterion_value(score_branches(node.class_counts, branches), params_.criterion);
          if (s > best.score) {
            best = {s, a, groups[g].value + (groups[g + 1].value - groups[g].value) / 2.0};
          }
        }
      } else {
        BranchCounts branches(spec.domain.size(), std::vector<double>(k, 0.0));
        for (auto i : idx) branches[static_cast<std::size_t>(data_[i].values[a])][data_[i].label] += 1;
        const bool all_big = std::all_of(branches.begin(), branches.end(), [&](const auto& b) {
          return std::accumulate(b.begin(), b.end(), 0.0) >= static_cast<double>(min_leaf);
        });
        if (!all_big) continue;
        const double s =
            criterion_value(score_branches(node.class_counts, branches), params_.criterion);
        if (s > best.score) best = {s, a, 0.0};
      }
    }

    if (!best.attribute) return node;

    const std::size_t a = *best.attribute;
    const auto& spec = schema.attributes()[a];
    node.attribute = a;
    std::vector<std::vector<std::size_t>> parts;
    if (spec.kind == AttributeKind::numeric) {
      node.threshold = best.threshold;
      parts.resize(2);
      for (auto i : idx) parts[data_[i].values[a] <= best.threshold ? 0 : 1].push_back(i);
    } else {
      parts.resize(spec.domain.size());
      for (auto i : idx) parts[static_cast<std::size_t>(data_[i].values[a])].push_back(i);
    }
    for (const auto& part : parts) node.children.push_back(grow(part, depth + 1));
    return node;
  }

 private:
  const Dataset& data_;
  const BuildParams& params_;
};

std::size_t count_nodes(const TreeNode& n, bool leaves_only) {
  std::size_t total = (!leaves_only || n.is_leaf()) ? 1 : 0;
  for (const auto& c : n.children) total += count_nodes(c, leaves_only);
  return total;
}

std::size_t node_depth(const TreeNode& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(c));
  return d;
}

void check_node(const Schema& schema, const TreeNode& n) {
  const std::size_t k = schema.class_count();
  if (n.class_counts.size() != k || n.distribution.size() != k || n.label >= k) {
    throw Error(ErrorKind::InvalidModel, "node class vectors do not match the label domain");
  }
  if (n.is_leaf()) {
    if (n.attribute) throw Error(ErrorKind::InvalidModel, "leaf carries a split attribute");
    const double sum = std::accumulate(n.distribution.begin(), n.distribution.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidModel, fmt::format("leaf distribution sums to {}", sum));
    }
    return;
  }
  if (!n.attribute || *n.attribute >= schema.arity()) {
    throw Error(ErrorKind::InvalidModel, "split without a valid attribute");
  }
  const auto& spec = schema.attributes()[*n.attribute];
  const std::size_t want = spec.kind == AttributeKind::numeric ? 2 : spec.domain.size();
  if (n.children.size() != want) {
    throw Error(ErrorKind::InvalidModel,
                fmt::format("split on {} has {} branches, expected {}", spec.name,
                            n.children.size(), want));
  }
  for (const auto& c : n.children) check_node(schema, c);
}

}  // namespace

Schema::Schema(std::vector<AttributeSpec> attributes, AttributeSpec label)
    : attributes_(std::move(attributes)), label_(std::move(label)) {
  std::set<std::string> names;
  auto check = [&](const AttributeSpec& a) {
    if (a.name.empty()) throw Error(ErrorKind::SchemaMismatch, "attribute with empty name");
    if (!names.insert(a.name).second) {
      throw Error(ErrorKind::SchemaMismatch, fmt::format("duplicate attribute {}", a.name));
    }
    if (a.kind == AttributeKind::nominal) {
      if (a.domain.empty()) {
        throw Error(ErrorKind::SchemaMismatch, fmt::format("nominal {} has an empty domain", a.name));
      }
      std::set<std::string> values(a.domain.begin(), a.domain.end());
      if (values.size() != a.domain.size()) {
        throw Error(ErrorKind::SchemaMismatch, fmt::format("nominal {} repeats a value", a.name));
      }
    } else if (!a.domain.empty()) {
      throw Error(ErrorKind::SchemaMismatch, fmt::format("numeric {} has a domain", a.name));
    }
  };
  for (const auto& a : attributes_) check(a);
  if (label_.kind != AttributeKind::nominal) {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("label {} must be nominal", label_.name));
  }
  check(label_);
}

std::size_t Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  throw Error(ErrorKind::UnknownAttribute, fmt::format("no attribute named '{}'", name));
}

std::size_t Schema::class_index(std::string_view value) const {
  const auto it = std::find(label_.domain.begin(), label_.domain.end(), value);
  if (it == label_.domain.end()) {
    throw Error(ErrorKind::SchemaMismatch,
                fmt::format("'{}' is not a value of {}", value, label_.name));
  }
  return static_cast<std::size_t>(it - label_.domain.begin());
}

std::size_t Schema::nominal_index(std::size_t attribute, std::string_view value) const {
  check_attribute(*this, attribute);
  const auto& d = attributes_[attribute].domain;
  const auto it = std::find(d.begin(), d.end(), value);
  if (it == d.end()) {
    throw Error(ErrorKind::SchemaMismatch,
                fmt::format("'{}' is not a value of {}", value, attributes_[attribute].name));
  }
  return static_cast<std::size_t>(it - d.begin());
}

void validate(const Schema& schema, const Instance& instance) {
  if (instance.values.size() != schema.arity()) {
    throw Error(ErrorKind::SchemaMismatch,
                fmt::format("instance has {} values, schema has {} attributes",
                            instance.values.size(), schema.arity()));
  }
  if (instance.label >= schema.class_count()) {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("class index {} out of range", instance.label));
  }
  for (std::size_t i = 0; i < schema.arity(); ++i) {
    const auto& spec = schema.attributes()[i];
    const double v = instance.values[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::MissingValue, fmt::format("{} is not a finite value", spec.name));
    }
    if (spec.kind == AttributeKind::nominal &&
        (v < 0 || v != std::floor(v) || v >= static_cast<double>(spec.domain.size()))) {
      throw Error(ErrorKind::SchemaMismatch,
                  fmt::format("{} index {} outside its domain", spec.name, v));
    }
  }
}

void Dataset::add(Instance instance) {
  validate(schema_, instance);
  rows_.push_back(std::move(instance));
}

std::vector<double> Dataset::class_counts() const {
  std::vector<double> counts(schema_.class_count(), 0.0);
  for (const auto& r : rows_) counts[r.label] += 1;
  return counts;
}

std::string_view to_string(Criterion c) { return c == Criterion::gain ? "gain" : "gain-ratio"; }

Criterion parse_criterion(std::string_view name) {
  if (name == "gain") return Criterion::gain;
  if (name == "gain-ratio" || name == "gain_ratio") return Criterion::gain_ratio;
  throw Error(ErrorKind::InvalidParams, fmt::format("unknown criterion '{}'", name));
}

double info_gain(const Dataset& data, std::size_t attribute, std::optional<double> threshold) {
  return score_split(data, attribute, threshold).gain;
}

double gain_ratio(const Dataset& data, std::size_t attribute, std::optional<double> threshold) {
  const auto s = score_split(data, attribute, threshold);
  return s.split_info > 0.0 ? s.gain / s.split_info : 0.0;
}

std::vector<double> candidate_thresholds(const Dataset& data, std::size_t attribute) {
  check_attribute(data.schema(), attribute);
  if (data.schema().attributes()[attribute].kind != AttributeKind::numeric) return {};
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto sorted = sorted_by(data, std::move(idx), attribute);
  const auto groups = value_groups(data, sorted, attribute);
  std::vector<double> out;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    if (is_boundary(groups[g], groups[g + 1])) {
      out.push_back(groups[g].value + (groups[g + 1].value - groups[g].value) / 2.0);
    }
  }
  return out;
}

std::vector<AttributeScore> rank_attributes(const Dataset& data, Criterion criterion) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "cannot rank attributes of no data");
  const auto& schema = data.schema();
  std::vector<AttributeScore> scores;
  for (std::size_t a = 0; a < schema.arity(); ++a) {
    AttributeScore s{a, schema.attributes()[a].name, 0.0, std::nullopt};
    if (schema.attributes()[a].kind == AttributeKind::numeric) {
      for (double t : candidate_thresholds(data, a)) {
        const double v = criterion_value(score_split(data, a, t), criterion);
        if (!s.threshold || v > s.score) {
          s.score = v;
          s.threshold = t;
        }
      }
    } else {
      s.score = criterion_value(score_split(data, a, std::nullopt), criterion);
    }
    scores.push_back(std::move(s));
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return scores;
}

DecisionTree::DecisionTree(Schema schema, TreeNode root)
    : schema_(std::move(schema)), root_(std::move(root)) {
  check_node(schema_, root_);
}

std::size_t DecisionTree::leaf_count() const { return count_nodes(root_, true); }
std::size_t DecisionTree::size() const { return count_nodes(root_, false); }
std::size_t DecisionTree::depth() const { return node_depth(root_); }

DecisionTree build_tree(const Dataset& data, const BuildParams& params) {
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "cannot train on an empty dataset");
  if (data.schema().arity() == 0) {
    throw Error(ErrorKind::SchemaMismatch, "schema has no input attributes");
  }
  if (params.min_leaf < 1) {
    throw Error(ErrorKind::InvalidParams, fmt::format("min_leaf {} < 1", params.min_leaf));
  }
  if (params.max_depth && *params.max_depth < 0) {
    throw Error(ErrorKind::InvalidParams, fmt::format("max_depth {} < 0", *params.max_depth));
  }
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  return DecisionTree(data.schema(), Builder(data, params).grow(idx, 0));
}

Prediction predict(const DecisionTree& tree, const Instance& instance) {
  const auto& schema = tree.schema();
  if (instance.values.size() != schema.arity()) {
    throw Error(ErrorKind::SchemaMismatch,
                fmt::format("instance has {} values, model expects {}", instance.values.size(),
                            schema.arity()));
  }
  const TreeNode* node = &tree.root();
  while (!node->is_leaf()) {
    const std::size_t a = *node->attribute;
    const double v = instance.values[a];
    if (schema.attributes()[a].kind == AttributeKind::numeric) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::SchemaMismatch,
                    fmt::format("{} is not finite", schema.attributes()[a].name));
      }
      node = &node->children[v <= node->threshold ? 0 : 1];
    } else {
      if (v < 0 || v != std::floor(v) || v >= static_cast<double>(node->children.size())) {
        throw Error(ErrorKind::SchemaMismatch,
                    fmt::format("{} index {} outside its domain", schema.attributes()[a].name, v));
      }
      node = &node->children[static_cast<std::size_t>(v)];
    }
  }
  return {node->label, node->distribution};
}

EvalReport evaluate(const DecisionTree& tree, const Dataset& test) {
  if (test.empty()) throw Error(ErrorKind::EmptyDataset, "cannot evaluate on an empty dataset");
  if (!(test.schema() == tree.schema())) {
    throw Error(ErrorKind::SchemaMismatch, "test data schema differs from the model schema");
  }
  const auto k = static_cast<Eigen::Index>(tree.schema().class_count());
  EvalReport report;
  report.instances = test.size();
  report.confusion = Eigen::MatrixXi::Zero(k, k);
  double squared = 0.0;
  for (const auto& row : test.rows()) {
    const auto p = predict(tree, row);
    report.confusion(static_cast<Eigen::Index>(row.label), static_cast<Eigen::Index>(p.label)) += 1;
    for (std::size_t c = 0; c < p.distribution.size(); ++c) {
      const double d = p.distribution[c] - (c == row.label ? 1.0 : 0.0);
      squared += d * d;
    }
  }
  const double n = static_cast<double>(test.size());
  report.accuracy = static_cast<double>(report.confusion.trace()) / n;
  report.rmse = std::sqrt(squared / (n * static_cast<double>(k)));
  return report;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidFraction,
                fmt::format("train fraction {} not in (0,1)", train_fraction));
  }
  if (data.empty()) throw Error(ErrorKind::EmptyDataset, "cannot split an empty dataset");

  const std::size_t k = data.schema().class_count();
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data[i].label].push_back(i);

  Rng rng(seed);
  for (auto& group : by_class) rng.shuffle(std::span<std::size_t>(group));

  // Largest-remainder apportionment of the train quota across classes.
  const auto target = static_cast<std::size_t>(
      std::llround(static_cast<double>(data.size()) * train_fraction));
  std::vector<std::size_t> quota(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * train_fraction;
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  while (assigned < target) {
    bool progressed = false;
    for (auto c : order) {
      if (assigned == target) break;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }

  std::vector<bool> in_train(data.size(), false);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < quota[c]; ++i) in_train[by_class[c][i]] = true;
  }
  Dataset train(data.schema());
  Dataset test(data.schema());
  for (std::size_t i = 0; i < data.size(); ++i) (in_train[i] ? train : test).add(data[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace sac::dtree
