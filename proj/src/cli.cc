#include "sac/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sac/dtree.h"
#include "sac/error.h"
#include "sac/ingest.h"
#include "sac/reliability.h"
#include "sac/synthgen.h"

namespace sac::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string in;
  std::string roster;
  std::string out;
  std::string model;
  int weeks = 11;
  std::string estimator = "population";
  std::string criterion = "gain-ratio";
  int min_leaf = 2;
  double fraction = 0.70;
  std::uint64_t seed = 1;
  std::string format;
  std::string gen_kind;
};

std::ifstream open_in(const std::string& path, std::string_view flag) {
  if (path.empty()) throw Error(ErrorKind::InvalidParams, fmt::format("{} is required", flag));
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, fmt::format("cannot open {} '{}'", flag, path));
  return f;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", path));
  f << bytes;
  if (!f.flush()) throw Error(ErrorKind::IoError, fmt::format("write to '{}' failed", path));
}

std::string format_or(const RunConfig& cfg, std::string_view fallback,
                      std::initializer_list<std::string_view> allowed) {
  const std::string f = cfg.format.empty() ? std::string(fallback) : cfg.format;
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
    std::string list;
    for (auto a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
    throw Error(ErrorKind::InvalidParams,
                fmt::format("--format {} not supported here (use {})", f, list));
  }
  return f;
}

fs::path schema_sidecar(const std::string& dataset_path) {
  fs::path p(dataset_path);
  return p.parent_path() / (p.stem().string() + ".schema.json");
}

dtree::Schema load_schema_for(const std::string& dataset_path) {
  const auto path = schema_sidecar(dataset_path);
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IoError, fmt::format("cannot open schema '{}'", path.string()));
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("{}: {}", path.string(), e.what()));
  }
  return dtree::schema_from_json(j);
}

dtree::Dataset load_dataset(const std::string& path, const dtree::Schema& schema,
                            bool label_required = true) {
  auto f = open_in(path, "--in");
  return dtree::read_dataset_csv(f, schema, label_required);
}

dtree::DecisionTree load_model(const std::string& path, std::string_view flag) {
  auto f = open_in(path, flag);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, fmt::format("{}: {}", path, e.what()));
  }
  return dtree::tree_from_json(j);
}

dtree::BuildParams build_params(const RunConfig& cfg) {
  dtree::BuildParams p;
  p.criterion = dtree::parse_criterion(cfg.criterion);
  p.min_leaf = cfg.min_leaf;
  return p;
}

std::string opt_fixed(const std::optional<double>& v, int decimals) {
  return v ? fmt::format("{:.{}f}", *v, decimals) : std::string("-");
}

std::string scores_artifact(const std::vector<ModuleScore>& rows, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      nlohmann::ordered_json j;
      j["module_code"] = r.module_code;
      j["semester"] = r.semester;
      j["weeks_total"] = r.weeks_total;
      j["attendance_taken"] = r.taken_count;
      j["attend_avg"] = r.attend_avg ? nlohmann::ordered_json(*r.attend_avg) : nullptr;
      j["sac"] = r.sac ? nlohmann::ordered_json(*r.sac) : nullptr;
      j["sac_strength"] = r.strength;
      arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  write_scores_csv(os, rows);
  return os.str();
}

void print_scores(std::ostream& out, const std::vector<ModuleScore>& rows) {
  out << fmt::format("{:<12} {:>3} {:>5} {:>5} {:>10} {:>6} {:>8}\n", "module_code", "sem",
                     "weeks", "taken", "attend_avg", "sac", "strength");
  for (const auto& r : rows) {
    out << fmt::format("{:<12} {:>3} {:>5} {:>5} {:>10} {:>6} {:>8}\n", r.module_code, r.semester,
                       r.weeks_total, r.taken_count, opt_fixed(r.attend_avg, 1),
                       opt_fixed(r.sac, 3), r.flagged() ? std::string("-") : std::to_string(r.strength));
  }
  for (const auto& r : rows) {
    if (r.flagged()) {
      out << fmt::format("flagged {} semester {}: NoAttendanceTaken\n", r.module_code, r.semester);
    }
  }
}

int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto format = format_or(cfg, "csv", {"csv", "json"});
  auto events_in = open_in(cfg.in, "--in");
  auto parsed = parse_events(events_in);
  auto cleaned = clean_events(std::move(parsed.events));
  const auto report = combine(parsed.report, cleaned.report);

  std::optional<std::vector<RosterEntry>> roster;
  if (!cfg.roster.empty()) {
    auto roster_in = open_in(cfg.roster, "--roster");
    roster = parse_roster(roster_in);
  }
  std::optional<std::span<const RosterEntry>> roster_view;
  if (roster) roster_view = std::span<const RosterEntry>(*roster);
  const auto agg = aggregate(cleaned.events, roster_view, cfg.weeks);

  std::vector<ModuleScore> rows;
  for (const auto& rec : agg.records) rows.push_back(score(rec));

  out << fmt::format("rows read {}, kept {}, duplicates dropped {}, conflicts resolved {}, rejected {}\n",
                     report.rows_read, report.kept, report.duplicates_dropped,
                     report.conflicts_resolved, report.rows_rejected);
  for (const auto& r : report.rejections) {
    out << fmt::format("rejected line {}: {}\n", r.line, r.reason);
  }
  print_scores(out, rows);
  if (!cfg.out.empty()) write_file(cfg.out, scores_artifact(rows, format));
  for (const auto& d : agg.diagnostics) err << "rejected record: " << d << '\n';
  return agg.diagnostics.empty() ? kOk : kValidation;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const auto format = format_or(cfg, "csv", {"csv", "json"});
  auto in = open_in(cfg.in, "--in");
  const auto rows = read_scores_csv(in);
  print_scores(out, rows);
  if (!cfg.out.empty()) write_file(cfg.out, scores_artifact(rows, format));
  return kOk;
}

int cmd_reliability(const RunConfig& cfg, std::ostream& out) {
  const auto format = format_or(cfg, "json", {"json", "text"});
  auto in = open_in(cfg.in, "--in");
  const auto panel = read_panel_csv(in);
  const auto b = cronbach_alpha(panel, parse_estimator(cfg.estimator));

  std::ostringstream text;
  text << fmt::format("modules {}, years {}, estimator {}\n", b.m, b.k, to_string(b.estimator));
  if (b.estimator == Estimator::paper_mixed) {
    text << "note: paper-mixed uses sample item variances with a population total variance;\n"
            "      it exists only to reproduce the published reliability table\n";
  }
  for (std::size_t i = 0; i < b.per_item_variance.size(); ++i) {
    text << fmt::format("  var[{}] = {:.4f}\n", panel.year_labels()[i], b.per_item_variance[i]);
  }
  text << fmt::format("sum of item variances = {:.4f}\n", b.sum_item_variance);
  text << fmt::format("total score variance  = {:.4f}\n", b.total_score_variance);
  text << fmt::format("alpha = {:.3f}\n", b.alpha);
  out << text.str();

  if (!cfg.out.empty()) {
    write_file(cfg.out, format == "json" ? to_json(b).dump(2) + "\n" : text.str());
  }
  return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  format_or(cfg, "json", {"json"});
  const auto schema = load_schema_for(cfg.in);
  const auto data = load_dataset(cfg.in, schema);
  const auto params = build_params(cfg);
  const auto tree = dtree::build_tree(data, params);

  out << fmt::format("trained on {} instances, criterion {}, min_leaf {}\n", data.size(),
                     dtree::to_string(params.criterion), params.min_leaf);
  out << fmt::format("leaves {}, tree size {}\n", tree.leaf_count(), tree.size());
  out << "attribute ranking:\n";
  for (const auto& s : dtree::rank_attributes(data, params.criterion)) {
    out << fmt::format("  {:<16} {:.3f}\n", s.name, s.score);
  }
  if (!cfg.out.empty()) write_file(cfg.out, dtree::to_json(tree).dump(2) + "\n");
  return kOk;
}

int cmd_rules(const RunConfig& cfg, std::ostream& out) {
  const auto format = format_or(cfg, "text", {"text", "json"});
  const auto tree = load_model(cfg.in, "--in");
  const auto rules = dtree::extract_rules(tree);
  std::string text;
  for (const auto& line : rules.render()) text += line + "\n";
  out << text;
  if (!cfg.out.empty()) {
    write_file(cfg.out, format == "json" ? dtree::to_json(rules).dump(2) + "\n" : text);
  }
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const auto format = format_or(cfg, "json", {"json", "text"});
  std::optional<dtree::DecisionTree> tree;
  std::optional<dtree::Dataset> test;
  if (!cfg.model.empty()) {
    tree = load_model(cfg.model, "--model");
    test = load_dataset(cfg.in, tree->schema());
    out << fmt::format("evaluating model on {} instances\n", test->size());
  } else {
    const auto schema = load_schema_for(cfg.in);
    const auto data = load_dataset(cfg.in, schema);
    auto [train, holdout] = dtree::split_dataset(data, cfg.fraction, cfg.seed);
    tree = dtree::build_tree(train, build_params(cfg));
    out << fmt::format("split {} instances: {} train, {} test (fraction {}, seed {})\n",
                       data.size(), train.size(), holdout.size(), cfg.fraction, cfg.seed);
    out << fmt::format("leaves {}, tree size {}\n", tree->leaf_count(), tree->size());
    test = std::move(holdout);
  }
  const auto report = dtree::evaluate(*tree, *test);
  std::ostringstream text;
  text << fmt::format("accuracy {:.4f}\nrmse {:.4f}\n", report.accuracy, report.rmse);
  text << "confusion (rows true, cols predicted):\n";
  const auto& classes = tree->schema().label().domain;
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    if (report.confusion.row(r).sum() == 0 && report.confusion.col(r).sum() == 0) continue;
    text << fmt::format("  {:>4}:", classes[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
      text << fmt::format(" {}", report.confusion(r, c));
    }
    text << '\n';
  }
  out << text.str();
  if (!cfg.out.empty()) {
    write_file(cfg.out, format == "json" ? dtree::to_json(report, tree->schema()).dump(2) + "\n"
                                         : text.str());
  }
  return kOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  format_or(cfg, "csv", {"csv"});
  const auto tree = load_model(cfg.model, "--model");
  const auto data = load_dataset(cfg.in, tree.schema(), false);
  const auto& classes = tree.schema().label().domain;
  std::string csv = "row,predicted";
  for (const auto& c : classes) csv += ",p_" + c;
  csv += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = dtree::predict(tree, data[i]);
    csv += fmt::format("{},{}", i + 1, classes[p.label]);
    for (double v : p.distribution) csv += fmt::format(",{}", v);
    csv += '\n';
  }
  out << fmt::format("predicted {} instances\n", data.size());
  if (cfg.out.empty()) {
    out << csv;
  } else {
    write_file(cfg.out, csv);
  }
  return kOk;
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  if (cfg.gen_kind == "events") {
    format_or(cfg, "csv", {"csv"});
    synth::GenParams p;
    p.weeks_total = cfg.weeks;
    p.seed = cfg.seed;
    const auto bytes = synth::generate_events(p);
    out << fmt::format("generated {} modules x {} weeks (seed {})\n", p.module_count,
                       p.weeks_total, p.seed);
    if (cfg.out.empty()) {
      out << bytes;
    } else {
      write_file(cfg.out, bytes);
    }
    return kOk;
  }
  if (cfg.gen_kind == "dataset") {
    format_or(cfg, "csv", {"csv"});
    if (cfg.out.empty()) throw Error(ErrorKind::InvalidParams, "gen dataset requires --out");
    const auto data =
        synth::generate_rule_labeled_dataset(synth::kRuleTableThresholds, 59, cfg.seed);
    std::ostringstream os;
    dtree::write_dataset_csv(os, data);
    write_file(cfg.out, os.str());
    const auto sidecar = schema_sidecar(cfg.out);
    write_file(sidecar.string(), dtree::schema_to_json(data.schema()).dump(2) + "\n");
    out << fmt::format("generated {} instances -> {} (schema {})\n", data.size(), cfg.out,
                       sidecar.string());
    return kOk;
  }
  throw Error(ErrorKind::InvalidParams,
              fmt::format("gen kind '{}' unknown (use events|dataset)", cfg.gen_kind));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Student attendance credibility (SAC) scoring, reliability and classification"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--in", cfg.in, "Input file");
    sub->add_option("--out", cfg.out, "Output artifact path");
    sub->add_option("--format", cfg.format, "Artifact format (csv|json|text)");
  };
  auto add_tree = [&](CLI::App* sub) {
    sub->add_option("--criterion", cfg.criterion, "Split criterion (gain|gain-ratio)");
    sub->add_option("--min-leaf", cfg.min_leaf, "Minimum instances per leaf");
  };
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--fraction", cfg.fraction, "Train fraction in (0,1)");
    sub->add_option("--seed", cfg.seed, "Random seed");
  };

  auto* ingest = app.add_subcommand("ingest", "Events CSV -> cleaned per-module SAC records");
  add_common(ingest);
  ingest->add_option("--roster", cfg.roster, "Roster CSV (module_code,semester,registered)");
  ingest->add_option("--weeks", cfg.weeks, "Weeks in the semester");

  auto* score = app.add_subcommand("score", "Aggregate CSV -> SAC and strength");
  add_common(score);

  auto* reliability = app.add_subcommand("reliability", "Cronbach's alpha over a SAC panel");
  add_common(reliability);
  reliability->add_option("--estimator", cfg.estimator, "population|sample|paper-mixed");

  auto* train = app.add_subcommand("train", "Train a decision tree on a dataset");
  add_common(train);
  add_tree(train);

  auto* rules = app.add_subcommand("rules", "Extract rules from a model");
  add_common(rules);

  auto* evaluate = app.add_subcommand("evaluate", "Holdout or model evaluation");
  add_common(evaluate);
  add_tree(evaluate);
  add_split(evaluate);
  evaluate->add_option("--model", cfg.model, "Trained model JSON");

  auto* predict = app.add_subcommand("predict", "Classify dataset rows with a model");
  add_common(predict);
  predict->add_option("--model", cfg.model, "Trained model JSON");

  auto* gen = app.add_subcommand("gen", "Generate synthetic fixtures");
  gen->add_option("kind", cfg.gen_kind, "events|dataset")->required();
  gen->add_option("--out", cfg.out, "Output path");
  gen->add_option("--format", cfg.format, "Artifact format (csv)");
  gen->add_option("--weeks", cfg.weeks, "Weeks in the semester");
  gen->add_option("--seed", cfg.seed, "Random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (cfg.min_leaf < 1) {
      throw Error(ErrorKind::InvalidParams, fmt::format("--min-leaf {} < 1", cfg.min_leaf));
    }
    if (!(cfg.fraction > 0.0 && cfg.fraction < 1.0)) {
      throw Error(ErrorKind::InvalidFraction, fmt::format("--fraction {} not in (0,1)", cfg.fraction));
    }
    if (ingest->parsed()) return cmd_ingest(cfg, out, err);
    if (score->parsed()) return cmd_score(cfg, out);
    if (reliability->parsed()) return cmd_reliability(cfg, out);
    if (train->parsed()) return cmd_train(cfg, out);
    if (rules->parsed()) return cmd_rules(cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, out);
    if (predict->parsed()) return cmd_predict(cfg, out);
    if (gen->parsed()) return cmd_gen(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::IoError ? kIo : kValidation;
  }
  return kValidation;
}

}  // namespace sac::cli
