#include <algorithm>

#include <fmt/format.h>

#include "sac/csv.h"
#include "sac/dtree.h"

namespace sac::dtree {
namespace {

using ojson = nlohmann::ordered_json;

ojson spec_to_json(const AttributeSpec& a) {
  ojson j;
  j["name"] = a.name;
  j["kind"] = a.kind == AttributeKind::numeric ? "numeric" : "nominal";
  if (a.kind == AttributeKind::nominal) j["domain"] = a.domain;
  return j;
}

AttributeSpec spec_from_json(const nlohmann::json& j) {
  AttributeSpec a;
  a.name = j.at("name").get<std::string>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "numeric") {
    a.kind = AttributeKind::numeric;
  } else if (kind == "nominal") {
    a.kind = AttributeKind::nominal;
    a.domain = j.at("domain").get<std::vector<std::string>>();
  } else {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("unknown kind '{}' for {}", kind, a.name));
  }
  return a;
}

ojson node_to_json(const Schema& schema, const TreeNode& n) {
  ojson j;
  if (n.is_leaf()) {
    j["type"] = "leaf";
    j["class"] = schema.label().domain[n.label];
    j["counts"] = n.class_counts;
    j["distribution"] = n.distribution;
    return j;
  }
  const auto& spec = schema.attributes()[*n.attribute];
  j["type"] = "split";
  j["attribute"] = spec.name;
  if (spec.kind == AttributeKind::numeric) j["threshold"] = n.threshold;
  j["counts"] = n.class_counts;
  j["distribution"] = n.distribution;
  ojson branches = ojson::array();
  for (std::size_t b = 0; b < n.children.size(); ++b) {
    ojson branch;
    if (spec.kind == AttributeKind::numeric) {
      branch["test"] = b == 0 ? "<=" : ">";
    } else {
      branch["test"] = "=";
      branch["value"] = spec.domain[b];
    }
    branch["node"] = node_to_json(schema, n.children[b]);
    branches.push_back(std::move(branch));
  }
  j["branches"] = std::move(branches);
  return j;
}

TreeNode node_from_json(const Schema& schema, const nlohmann::json& j) {
  TreeNode n;
  n.class_counts = j.at("counts").get<std::vector<double>>();
  n.distribution = j.at("distribution").get<std::vector<double>>();
  const auto type = j.at("type").get<std::string>();
  if (type == "leaf") {
    n.label = schema.class_index(j.at("class").get<std::string>());
    return n;
  }
  if (type != "split") throw Error(ErrorKind::InvalidModel, fmt::format("node type '{}'", type));
  const std::size_t a = schema.index_of(j.at("attribute").get<std::string>());
  n.attribute = a;
  if (schema.attributes()[a].kind == AttributeKind::numeric) {
    n.threshold = j.at("threshold").get<double>();
  }
  for (const auto& branch : j.at("branches")) {
    n.children.push_back(node_from_json(schema, branch.at("node")));
  }
  n.label = static_cast<std::size_t>(
      std::max_element(n.class_counts.begin(), n.class_counts.end()) - n.class_counts.begin());
  return n;
}

std::string format_value(const AttributeSpec& spec, double v) {
  if (spec.kind == AttributeKind::nominal) return spec.domain[static_cast<std::size_t>(v)];
  return fmt::format("{}", v);
}

}  // namespace

nlohmann::ordered_json schema_to_json(const Schema& schema) {
  ojson j;
  j["label"] = schema.label().name;
  ojson attrs = ojson::array();
  for (const auto& a : schema.attributes()) attrs.push_back(spec_to_json(a));
  attrs.push_back(spec_to_json(schema.label()));
  j["attributes"] = std::move(attrs);
  return j;
}

Schema schema_from_json(const nlohmann::json& j) {
  try {
    const auto label_name = j.at("label").get<std::string>();
    std::vector<AttributeSpec> attrs;
    std::optional<AttributeSpec> label;
    for (const auto& a : j.at("attributes")) {
      auto spec = spec_from_json(a);
      if (spec.name == label_name) {
        label = std::move(spec);
      } else {
        attrs.push_back(std::move(spec));
      }
    }
    if (!label) {
      throw Error(ErrorKind::SchemaMismatch,
                  fmt::format("label '{}' is not among the attributes", label_name));
    }
    return Schema(std::move(attrs), std::move(*label));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("malformed schema JSON: {}", e.what()));
  }
}

nlohmann::ordered_json to_json(const DecisionTree& tree) {
  ojson j;
  j["format"] = "sac-dtree";
  j["version"] = 1;
  j["schema"] = schema_to_json(tree.schema());
  j["leaves"] = tree.leaf_count();
  j["size"] = tree.size();
  j["root"] = node_to_json(tree.schema(), tree.root());
  return j;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "sac-dtree" || j.at("version").get<int>() != 1) {
      throw Error(ErrorKind::InvalidModel, "not a sac-dtree v1 model");
    }
    auto schema = schema_from_json(j.at("schema"));
    auto root = node_from_json(schema, j.at("root"));
    return DecisionTree(std::move(schema), std::move(root));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, fmt::format("malformed model JSON: {}", e.what()));
  }
}

nlohmann::ordered_json to_json(const RuleSet& set) {
  ojson rules = ojson::array();
  for (const auto& r : set.rules) {
    ojson jr;
    ojson conds = ojson::array();
    for (const auto& c : r.conditions) {
      const auto& spec = set.schema.attributes()[c.attribute];
      ojson jc;
      jc["attribute"] = spec.name;
      switch (c.op) {
        case Condition::Op::le: jc["op"] = "<="; jc["value"] = c.value; break;
        case Condition::Op::gt: jc["op"] = ">"; jc["value"] = c.value; break;
        case Condition::Op::eq:
          jc["op"] = "=";
          jc["value"] = spec.domain[static_cast<std::size_t>(c.value)];
          break;
      }
      conds.push_back(std::move(jc));
    }
    jr["conditions"] = std::move(conds);
    jr["class"] = set.schema.label().domain[r.label];
    jr["coverage"] = r.coverage;
    jr["confidence"] = r.confidence;
    jr["text"] = set.render(r);
    rules.push_back(std::move(jr));
  }
  ojson j;
  j["rules"] = std::move(rules);
  return j;
}

nlohmann::ordered_json to_json(const EvalReport& report, const Schema& schema) {
  ojson j;
  j["instances"] = report.instances;
  j["accuracy"] = report.accuracy;
  j["rmse"] = report.rmse;
  j["classes"] = schema.label().domain;
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    std::vector<int> row(static_cast<std::size_t>(report.confusion.cols()));
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = report.confusion(r, c);
    }
    rows.push_back(row);
  }
  j["confusion"] = std::move(rows);
  return j;
}

Dataset read_dataset_csv(std::istream& in, const Schema& schema, bool label_required) {
  std::size_t line_no = 0;
  std::string line;
  if (!csv::next_line(in, line, line_no)) throw Error(ErrorKind::MissingHeader, "empty dataset");
  const auto header = csv::split(line);

  auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw Error(ErrorKind::SchemaMismatch, fmt::format("dataset has no column '{}'", name));
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> columns;
  for (const auto& a : schema.attributes()) columns.push_back(column_of(a.name));
  const bool has_label = label_required || std::find(header.begin(), header.end(),
                                                     schema.label().name) != header.end();
  const std::size_t label_col = has_label ? column_of(schema.label().name) : 0;

  Dataset data(schema);
  while (csv::next_line(in, line, line_no)) {
    const auto f = csv::split(line);
    if (f.size() != header.size()) {
      throw Error(ErrorKind::ParseError, fmt::format("line {}: expected {} fields, got {}",
                                                     line_no, header.size(), f.size()));
    }
    Instance inst;
    try {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        const auto& cell = f[columns[i]];
        const auto& spec = schema.attributes()[i];
        if (cell.empty()) {
          throw Error(ErrorKind::MissingValue, fmt::format("{} is empty", spec.name));
        }
        if (spec.kind == AttributeKind::nominal) {
          inst.values.push_back(static_cast<double>(schema.nominal_index(i, cell)));
        } else {
          double v = 0.0;
          if (!csv::parse_double(cell, v)) {
            throw Error(ErrorKind::ParseError, fmt::format("{}: '{}' is not a number", spec.name, cell));
          }
          inst.values.push_back(v);
        }
      }
      if (has_label) {
        if (f[label_col].empty()) {
          throw Error(ErrorKind::MissingValue, fmt::format("{} is empty", schema.label().name));
        }
        inst.label = schema.class_index(f[label_col]);
      }
      data.add(std::move(inst));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("line {}: {}", line_no, e.detail()));
    }
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const auto& schema = data.schema();
  for (const auto& a : schema.attributes()) out << a.name << ',';
  out << schema.label().name << '\n';
  for (const auto& row : data.rows()) {
    for (std::size_t i = 0; i < schema.arity(); ++i) {
      out << format_value(schema.attributes()[i], row.values[i]) << ',';
    }
    out << schema.label().domain[row.label] << '\n';
  }
}

}  // namespace sac::dtree
