#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "kpz/experiments.hpp"

using namespace kpz;
namespace fs = std::filesystem;

namespace {

ExperimentResult tiny_result() {
  ExperimentResult r;
  r.name = "tiny";
  r.parameters = {{"alpha", "0.001"}, {"seed", "7"}};
  Cell a;
  a.add("idx", 1LL).add("value", 0.5).add("flag", true).add("note", std::string("ok"));
  Cell b;
  b.add("idx", -2LL)
      .add("value", std::numeric_limits<double>::quiet_NaN())
      .add("flag", false)
      .add("note", std::string("x"));
  Cell c;
  c.add("idx", 3LL)
      .add("value", -std::numeric_limits<double>::infinity())
      .add("flag", true)
      .add("note", std::string("y"));
  r.cells = {a, b, c};
  TestReport t;
  t.name = "probe";
  t.statistic = 1.5;
  t.p_value = 0.25;
  t.alpha = 0.001;
  t.pass = true;
  t.n = 10;
  r.tests = {t};
  r.pass = true;
  r.runtime_seconds = 123.0;  // must never reach the serialized forms
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const Cell* find_cell(const ExperimentResult& r, const std::string& column,
                      const std::string& value) {
  for (const auto& cell : r.cells)
    for (const auto& [k, v] : cell.fields)
      if (k == column && std::holds_alternative<std::string>(v) &&
          std::get<std::string>(v) == value)
        return &cell;
  return nullptr;
}

bool cell_flag(const Cell& cell, const std::string& column) {
  for (const auto& [k, v] : cell.fields)
    if (k == column) return std::get<bool>(v);
  FAIL("missing column ", column);
  return false;
}

}  // namespace

TEST_CASE("csv serialization is exact") {
  const ExperimentResult r = tiny_result();
  CHECK(to_csv(r) ==
        "idx,value,flag,note\n"
        "1,0.5,true,ok\n"
        "-2,nan,false,x\n"
        "3,-inf,true,y\n");
  ExperimentResult empty;
  empty.name = "none";
  CHECK(to_csv(empty) == "");
}

TEST_CASE("ragged or reordered cells are rejected") {
  ExperimentResult r = tiny_result();
  r.cells[1].fields.pop_back();
  CHECK_THROWS(to_csv(r));
  ExperimentResult s = tiny_result();
  std::swap(s.cells[2].fields[0], s.cells[2].fields[1]);
  CHECK_THROWS(to_csv(s));
}

TEST_CASE("json serialization shape") {
  const std::string text = to_json_string(tiny_result());
  CHECK(text.substr(0, 2) == "{\n");
  CHECK(text.back() == '\n');
  // Ordered document: experiment, params, cells, tests, pass.
  CHECK(text.find("\"experiment\"") < text.find("\"params\""));
  CHECK(text.find("\"params\"") < text.find("\"cells\""));
  CHECK(text.find("\"cells\"") < text.find("\"tests\""));
  CHECK(text.find("runtime") == std::string::npos);

  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["experiment"] == "tiny");
  CHECK(doc["params"]["alpha"] == "0.001");
  CHECK(doc["params"]["seed"] == "7");
  REQUIRE(doc["cells"].size() == 3);
  CHECK(doc["cells"][0]["idx"] == 1);
  CHECK(doc["cells"][0]["value"] == 0.5);
  CHECK(doc["cells"][0]["flag"] == true);
  CHECK(doc["cells"][0]["note"] == "ok");
  CHECK(doc["cells"][1]["value"].is_null());  // nan and inf land as null
  CHECK(doc["cells"][2]["value"].is_null());
  REQUIRE(doc["tests"].size() == 1);
  CHECK(doc["tests"][0]["name"] == "probe");
  CHECK(doc["tests"][0]["p_value"] == 0.25);
  CHECK(doc["pass"] == true);
}

TEST_CASE("write_outputs emits three consistent files") {
  const ExperimentResult r = tiny_result();
  const fs::path dir = fs::temp_directory_path() / "kpz_test_write_outputs";
  fs::remove_all(dir);
  write_outputs(r, dir.string());
  CHECK(slurp(dir / "tiny.csv") == to_csv(r));
  CHECK(slurp(dir / "tiny.json") == to_json_string(r));
  const auto manifest = nlohmann::json::parse(slurp(dir / "tiny_manifest.json"));
  CHECK(manifest.size() == 2);
  CHECK(manifest["experiment"] == "tiny");
  CHECK(manifest["params"]["seed"] == "7");
  fs::remove_all(dir);
}

TEST_CASE("golden artifacts") {
  // The committed files were produced by the command-line tool; rerunning the
  // same configuration must reproduce all three byte for byte.
  QueueingFuzzConfig cfg;
  cfg.width_lo = 30;
  cfg.width_hi = 40;
  cfg.max_levels = 3;
  cfg.seeds = 6;
  cfg.seed = 2024;
  const ExperimentResult res = run_queueing_fuzz(cfg);
  CHECK(res.pass);
  const fs::path golden = KPZ_GOLDEN_DIR;
  const fs::path tmp = fs::temp_directory_path() / "kpz_test_golden";
  fs::remove_all(tmp);
  write_outputs(res, tmp.string());
  for (const char* name :
       {"queueing-fuzz.csv", "queueing-fuzz.json", "queueing-fuzz_manifest.json"}) {
    CHECK(slurp(tmp / name) == slurp(golden / name));
  }
  fs::remove_all(tmp);
}

TEST_CASE("queueing fuzz aggregates") {
  QueueingFuzzConfig cfg;
  cfg.seeds = 10;
  const ExperimentResult res = run_queueing_fuzz(cfg);
  CHECK(res.pass);
  // 4 checks x 2 temperatures per seed, plus near-tie and minimal extras.
  CHECK(res.cells.size() == 10 * 8 + 4 + 2);
  CHECK(res.tests.size() == 8);  // one aggregate per (check, temperature)
  for (const auto& t : res.tests) CHECK(t.pass);

  QueueingFuzzConfig bad = cfg;
  bad.width_lo = 2;
  CHECK_THROWS(run_queueing_fuzz(bad));
  bad = cfg;
  bad.max_levels = 0;
  CHECK_THROWS(run_queueing_fuzz(bad));
}

TEST_CASE("independence runs and flags the overlap control") {
  IndependenceConfig cfg;
  cfg.path_spec = "staircase:6";
  cfg.replicas = 1000;
  const ExperimentResult one = run_independence(cfg);
  CHECK(one.pass);
  const Cell* control = find_cell(one, "statistic", "control_overlap");
  REQUIRE(control != nullptr);
  CHECK(cell_flag(*control, "pass"));  // dependence detected
  int controls = 0;
  for (const auto& cell : one.cells)
    for (const auto& [k, v] : cell.fields)
      if (k == "statistic" && std::holds_alternative<std::string>(v) &&
          std::get<std::string>(v) == "control_overlap")
        ++controls;
  CHECK(controls == 2);  // one per model

  // Worker count must not leak into the serialized result.
  IndependenceConfig two = cfg;
  two.workers = 2;
  const ExperimentResult res2 = run_independence(two);
  CHECK(to_csv(res2) == to_csv(one));
  CHECK(to_json_string(res2) == to_json_string(one));

  IndependenceConfig bad = cfg;
  bad.rhos = {0.3, 0.3, 0.7};
  CHECK_THROWS(run_independence(bad));  // neither distinct nor all equal
  bad = cfg;
  bad.rhos = {1.2};
  CHECK_THROWS(run_independence(bad));
  bad = cfg;
  bad.replicas = 500;
  CHECK_THROWS(run_independence(bad));
  bad = cfg;
  bad.path_spec = "staircase:1";  // two edges cannot host two blocks twice over
  CHECK_THROWS(run_independence(bad));
}

TEST_CASE("endpoint scaling is monotone by construction") {
  EndpointExperimentConfig cfg;
  cfg.N = {64};
  cfg.delta = {0.05, 0.4};  // no doubling pair: only the monotonicity property
  cfg.m = {0};
  cfg.replicas = 150;
  const ExperimentResult one = run_endpoint_scaling(cfg);
  CHECK(one.pass);
  CHECK(one.cells.size() == 2);
  for (const auto& t : one.tests) {
    CHECK(t.name.substr(0, 8) == "monotone");
    CHECK(t.pass);
  }

  EndpointExperimentConfig four = cfg;
  four.workers = 4;
  const ExperimentResult res4 = run_endpoint_scaling(four);
  CHECK(to_csv(res4) == to_csv(one));
  CHECK(to_json_string(res4) == to_json_string(one));

  EndpointExperimentConfig bad = cfg;
  bad.delta = {};
  CHECK_THROWS(run_endpoint_scaling(bad));
  bad = cfg;
  bad.delta = {9.0};
  CHECK_THROWS(run_endpoint_scaling(bad));
  bad = cfg;
  bad.N = {8};
  CHECK_THROWS(run_endpoint_scaling(bad));
  bad = cfg;
  bad.m = {1000};  // outside the |log delta| N^(2/3) window
  CHECK_THROWS(run_endpoint_scaling(bad));
}

TEST_CASE("appendix bounds smoke") {
  AppendixBoundsConfig cfg;
  cfg.n = 400;
  cfg.trials = 2000;
  cfg.t_grid = {1.0, 2.0, 3.0};
  cfg.diff_trials = 500;
  cfg.lower_n = 64;
  cfg.lower_trials = 2000;
  cfg.l_grid = {1.0, 100.0};
  cfg.drift = -0.05;
  const ExperimentResult res = run_appendix_bounds(cfg);
  CHECK(res.pass);
  // Upper rows for both families, lower rows for both drifts.
  CHECK(res.cells.size() == 2 * 3 + 2 * 2);
  bool saw_out_of_regime = false, saw_reported = false;
  for (const auto& cell : res.cells)
    for (const auto& [k, v] : cell.fields)
      if (k == "flag") {
        const std::string& flag = std::get<std::string>(v);
        saw_out_of_regime = saw_out_of_regime || flag == "out_of_regime";
        saw_reported = saw_reported || flag == "reported";
      }
  CHECK(saw_out_of_regime);
  CHECK(saw_reported);

  AppendixBoundsConfig bad = cfg;
  bad.l_grid = {};
  CHECK_THROWS(run_appendix_bounds(bad));
  bad = cfg;
  bad.diff_gap = 0.5;
  CHECK_THROWS(run_appendix_bounds(bad));
}

TEST_CASE("marginals smoke") {
  MarginalsConfig cfg;
  cfg.rhos = {0.5};
  cfg.samples = 400;
  const ExperimentResult res = run_marginals(cfg);
  CHECK(res.pass);
  CHECK(res.cells.size() == 4);  // 2 models x 2 directions
  CHECK(res.tests.size() == 4);
  for (const auto& t : res.tests) {
    CHECK(t.n == 400);
    CHECK(t.pass);
  }
  MarginalsConfig bad = cfg;
  bad.samples = 50;
  CHECK_THROWS(run_marginals(bad));
  bad = cfg;
  bad.rhos = {0.0};
  CHECK_THROWS(run_marginals(bad));
}

TEST_CASE("coalescence smoke") {
  CoalescenceConfig cfg;
  cfg.N = 32;
  cfg.replicas = 40;
  const ExperimentResult one = run_coalescence(cfg);
  CHECK(one.pass);
  CHECK(one.cells.size() == 1);
  CHECK(one.tests.size() == 2);

  CoalescenceConfig two = cfg;
  two.workers = 2;
  const ExperimentResult res2 = run_coalescence(two);
  CHECK(to_csv(res2) == to_csv(one));
  CHECK(to_json_string(res2) == to_json_string(one));

  CoalescenceConfig bad = cfg;
  bad.N = 4;
  CHECK_THROWS(run_coalescence(bad));
  bad = cfg;
  bad.replicas = 5;
  CHECK_THROWS(run_coalescence(bad));
}
