#include <algorithm>

#include <fmt/format.h>

#include "sac/dtree.h"

namespace sac::dtree {
namespace {

// Appends a condition, tightening an earlier bound on the same attribute
// and direction instead of repeating it.
void push_condition(std::vector<Condition>& conds, const Condition& c) {
  for (auto& existing : conds) {
    if (existing.attribute != c.attribute || existing.op != c.op) continue;
    if (c.op == Condition::Op::le) {
      existing.value = std::min(existing.value, c.value);
      return;
    }
    if (c.op == Condition::Op::gt) {
      existing.value = std::max(existing.value, c.value);
      return;
    }
  }
  conds.push_back(c);
}

void collect(const Schema& schema, const TreeNode& node, std::vector<Condition> path,
             std::vector<Rule>& out) {
  if (node.is_leaf()) {
    Rule r;
    r.conditions = std::move(path);
    r.label = node.label;
    double total = 0.0;
    for (double c : node.class_counts) total += c;
    r.coverage = static_cast<std::size_t>(total);
    r.confidence = total > 0.0 ? node.class_counts[node.label] / total : 0.0;
    out.push_back(std::move(r));
    return;
  }
  const std::size_t a = *node.attribute;
  const bool numeric = schema.attributes()[a].kind == AttributeKind::numeric;
  for (std::size_t b = 0; b < node.children.size(); ++b) {
    auto branch = path;
    if (numeric) {
      push_condition(branch, {a, b == 0 ? Condition::Op::le : Condition::Op::gt, node.threshold});
    } else {
      push_condition(branch, {a, Condition::Op::eq, static_cast<double>(b)});
    }
    collect(schema, node.children[b], std::move(branch), out);
  }
}

}  // namespace

bool Condition::holds(const Instance& instance) const {
  const double v = instance.values.at(attribute);
  switch (op) {
    case Op::le: return v <= value;
    case Op::gt: return v > value;
    case Op::eq: return v == value;
  }
  return false;
}

bool Rule::matches(const Instance& instance) const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [&](const Condition& c) { return c.holds(instance); });
}

std::optional<std::size_t> RuleSet::classify(const Instance& instance) const {
  for (const auto& r : rules) {
    if (r.matches(instance)) return r.label;
  }
  return std::nullopt;
}

std::string RuleSet::render(const Rule& rule) const {
  std::string text = "If ";
  if (rule.conditions.empty()) text += "true";
  for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
    const auto& c = rule.conditions[i];
    const auto& spec = schema.attributes()[c.attribute];
    if (i > 0) text += " and ";
    switch (c.op) {
      case Condition::Op::le: text += fmt::format("{} <= {:.4g}", spec.name, c.value); break;
      case Condition::Op::gt: text += fmt::format("{} > {:.4g}", spec.name, c.value); break;
      case Condition::Op::eq:
        text += fmt::format("{} = {}", spec.name, spec.domain[static_cast<std::size_t>(c.value)]);
        break;
    }
  }
  text += fmt::format(" then {} = {}", schema.label().name, schema.label().domain[rule.label]);
  return text;
}

std::vector<std::string> RuleSet::render() const {
  std::vector<std::string> lines;
  for (const auto& r : rules) lines.push_back(render(r));
  return lines;
}

RuleSet extract_rules(const DecisionTree& tree) {
  RuleSet set{tree.schema(), {}};
  collect(tree.schema(), tree.root(), {}, set.rules);
  return set;
}

}  // namespace sac::dtree
