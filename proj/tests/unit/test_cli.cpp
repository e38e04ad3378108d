#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlsd_cli/runner.hpp"

using namespace nlsd::cli;

namespace {

ptree merged(const std::string& preset, const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  ptree t = preset_tree(preset);
  for (const auto& [k, v] : extra) t.put(k, v);
  return t;
}

const CheckRecord* record(const Report& r, const std::string& name) {
  for (const auto& c : r.records)
    if (c.name == name) return &c;
  return nullptr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config errors name the field") {
  ptree t;
  t.put("run.task", "verify-smatrix");
  try {
    load_config(t);
    FAIL("missing seed accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "run.seed");
  }
  try {
    run(load_config(merged("resonant", {{"rep.a", "abc"}})));
    FAIL("malformed field accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "rep.a");
  }
  CHECK_THROWS_AS(preset_tree("no-such-case"), ConfigError);
  CHECK_THROWS_AS(parse_task("nope"), ConfigError);
  for (Task t2 : {Task::verify_smatrix, Task::hierarchy, Task::breaking_classify}) CHECK(parse_task(to_string(t2)) == t2);
}

TEST_CASE("presets") {
  std::vector<std::string> names;
  for (const auto& p : list_cases()) {
    names.push_back(p.name);
    CHECK_FALSE(p.anchor.empty());
  }
  for (const char* n : {"pure-transmission", "resonant", "breaking-cos-sin", "breaking-rotation", "bc-omega-1", "bc-omega-k"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  for (const auto& n : names) {
    CAPTURE(n);
    const Report r = run(load_config(preset_tree(n)));
    CHECK_FALSE(r.records.empty());
    CHECK(r.all_pass() == (n != "breaking-cos-sin"));
  }
}

TEST_CASE("reports are deterministic and independent of the job count") {
  const RunConfig c1 = load_config(merged("breaking-rotation"));
  RunConfig c4 = c1;
  c4.jobs = 4;
  const std::string a = render(run(c1));
  CHECK(a == render(run(c1)));
  CHECK(a == render(run(c4)));
  CHECK(a.find("wall_time") == std::string::npos);
  RunConfig timed = c1;
  timed.timing = true;
  const Report rt = run(timed);
  REQUIRE(rt.wall_time.has_value());
  CHECK(rt.to_json().contains("wall_time_s"));
}

TEST_CASE("resonant amplitude is (k^2 - 1)/(k^2 + 1)") {
  const Report r = run(load_config(
      merged("resonant", {{"run.task", "amplitude"}, {"amplitude.in", "1.5:-:1"}, {"amplitude.out", "-:1"}})));
  const CheckRecord* t = record(r, "amplitude-term-0");
  REQUIRE(t != nullptr);
  const double k = 1.5;
  CHECK(std::abs(t->value["value"][0].get<double>() - (k * k - 1) / (k * k + 1)) < 1e-15);
  CHECK(std::abs(t->value["value"][1].get<double>()) < 1e-15);
  CHECK(t->value["matching"][0]["sign"] == -1);
  CHECK(r.all_pass());
}

TEST_CASE("boundary preset renders the printed display") {
  const Report r = run(load_config(preset_tree("bc-omega-k")));
  const CheckRecord* f = record(r, "differential-form");
  REQUIRE(f != nullptr);
  std::string joined;
  for (const auto& l : f->value) joined += l.get<std::string>() + "\n";
  CHECK(joined == read_file(std::string(NLSD_GOLDEN_DIR) + "/scalar_omega_k.txt"));
  CHECK(r.all_pass());

  const Report bad = run(load_config(merged("bc-omega-k", {{"boundary.corrupt_y", "true"}})));
  CHECK_FALSE(bad.all_pass());
}

TEST_CASE("corrupted inputs fail their suites") {
  ptree s;
  s.put("run.task", "verify-smatrix");
  s.put("run.seed", "7");
  s.put("run.N", "2");
  CHECK(run(load_config(s)).all_pass());
  s.put("smatrix.rule", "corrupted");
  CHECK_FALSE(run(load_config(s)).all_pass());

  const ptree t = merged("resonant", {{"rep.a", "0.5"}, {"rep.b", "1"}, {"rep.c", "-0.85"}, {"rep.d", "0.3"},
                                      {"rep.alpha_phase", "0.4"}, {"rep.corrupt", "t-minus-sign"}});
  CHECK_FALSE(run(load_config(t)).all_pass());
}

TEST_CASE("module errors become failed records") {
  const Report r = run(load_config(merged("resonant", {{"run.task", "amplitude"}, {"amplitude.in", "1:-:1;-1:+:1"},
                                                       {"amplitude.out", "*:*;*:*"}})));
  CHECK_FALSE(r.all_pass());
  bool errored = false;
  for (const auto& c : r.records) errored = errored || !c.error.empty();
  CHECK(errored);
}

TEST_CASE("all_pass semantics") {
  Report r;
  CHECK_FALSE(r.all_pass());  // nothing checked is not a pass
  r.records.push_back({"a", "x/y", 1e-16, 1e-12, nullptr, true, ""});
  CHECK(r.all_pass());
  r.records.push_back({"b", "x/y", 1.0, 1e-12, nullptr, false, ""});
  CHECK_FALSE(r.all_pass());
  CHECK(r.to_json()["pass"] == false);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "nlsd_cli_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "report.json").string();
  write_atomic(path, "first\n");
  write_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
