#include <filesystem>
#include <fstream>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sac/cli.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = sac::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sac_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

const std::string kData = SAC_DATA_DIR;

}  // namespace

TEST_CASE("score prints the three worked modules") {
  const auto out = scratch("scores.csv");
  const auto r = run({"score", "--in", kData + "/sec3a_aggregate.csv", "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0.067") != std::string::npos);
  CHECK(r.out.find("0.349") != std::string::npos);
  CHECK(r.out.find("0.812") != std::string::npos);
  CHECK(slurp(out) ==
        "module_code,semester,weeks_total,attendance_taken,attend_avg,sac,sac_strength\n"
        "14COC180,1,11,1,73.7,0.067,1\n"
        "14COA105,1,11,7,54.8,0.349,4\n"
        "14COF180,1,11,11,81.2,0.812,9\n");
}

TEST_CASE("reliability prints alpha") {
  const auto json_out = scratch("alpha.json");
  auto r = run({"reliability", "--in", kData + "/table2_panel.csv", "--estimator", "paper-mixed",
                "--out", json_out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("alpha = 0.815") != std::string::npos);
  CHECK(r.out.find("paper-mixed") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(json_out));
  CHECK(j["estimator"] == "paper-mixed");
  CHECK(std::abs(j["alpha"].get<double>() - 0.815) < 0.01);

  r = run({"reliability", "--in", kData + "/table2_panel.csv", "--estimator", "bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidParams") != std::string::npos);
}

TEST_CASE("gen, train, rules, evaluate, predict") {
  const auto data = scratch("rules_data.csv");
  const auto model = scratch("model.json");
  const auto rules = scratch("rules.txt");
  REQUIRE(run({"gen", "dataset", "--seed", "2024", "--out", data.string()}).code == 0);
  CHECK(fs::exists(scratch("rules_data.schema.json")));

  auto r = run({"train", "--in", data.string(), "--out", model.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("leaves 6, tree size 11") != std::string::npos);

  r = run({"rules", "--in", model.string(), "--out", rules.string()});
  REQUIRE(r.code == 0);
  const auto text = slurp(rules);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  CHECK(text.find("then SAC_Strength = 10") != std::string::npos);

  r = run({"evaluate", "--in", data.string(), "--model", model.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("accuracy 1.0000") != std::string::npos);

  r = run({"evaluate", "--in", data.string(), "--fraction", "0.7", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("41 train, 18 test") != std::string::npos);

  const auto preds = scratch("preds.csv");
  r = run({"predict", "--model", model.string(), "--in", data.string(), "--out", preds.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(preds).rfind("row,predicted,p_1,", 0) == 0);
}

TEST_CASE("ingest pipeline and determinism") {
  const auto events = scratch("events.csv");
  REQUIRE(run({"gen", "events", "--seed", "9", "--out", events.string()}).code == 0);
  const auto a = scratch("agg_a.csv");
  const auto b = scratch("agg_b.csv");
  auto r1 = run({"ingest", "--in", events.string(), "--out", a.string()});
  auto r2 = run({"ingest", "--in", events.string(), "--out", b.string()});
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(a) == slurp(b));
  CHECK(r1.out.find("rejected 0") != std::string::npos);
}

TEST_CASE("ingest surfaces rejected rows and records") {
  const auto events = scratch("bad_events.csv");
  std::ofstream(events) << "student_id,module_code,semester,week,status\n"
                           "s1,M1,1,1,present\ns2,M1,1,1,present\ns3,M1,1,0,present\n";
  const auto roster = scratch("roster.csv");
  std::ofstream(roster) << "module_code,semester,registered\nM1,1,1\n";
  const auto r = run({"ingest", "--in", events.string(), "--roster", roster.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("rejected line 4") != std::string::npos);
  CHECK(r.err.find("exceeds registered") != std::string::npos);
}

TEST_CASE("usage and error exit codes") {
  auto r = run({"score", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  r = run({"frobnicate"});
  CHECK(r.code == 1);
  r = run({});
  CHECK(r.code == 1);
  r = run({"score", "--in", "/nonexistent/file.csv"});
  CHECK(r.code == 2);
  CHECK(r.err.find("IoError") != std::string::npos);
  r = run({"evaluate", "--in", kData + "/x.csv", "--fraction", "1.5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("InvalidFraction") != std::string::npos);
  r = run({"score", "--in", kData + "/sec3a_aggregate.csv", "--format", "xml"});
  CHECK(r.code == 1);
  r = run({"--help"});
  CHECK(r.code == 0);
}
