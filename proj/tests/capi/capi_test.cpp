#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "wmrecon/wmrecon.h"

extern "C" int wmr_header_check_c(void);

namespace {

const std::string kScript =
    "var keep = new Array();\n"
    "setMarker('Grow');\n"
    "keep.push(unescape('%u4141%u4141'));\n"
    "setMarker('Idle');\n"
    "var x = 1;\n"
    "resetMarker();\n"
    "resetMarker();\n";

struct Config {
  wmr_config* c = nullptr;
  Config() { REQUIRE(wmr_config_create(&c) == WMR_OK); }
  ~Config() { wmr_config_destroy(c); }
};

wmr_report* analyze(const Config& cfg, const std::string& src) {
  wmr_report* r = nullptr;
  REQUIRE(wmr_analyze_source(cfg.c, src.data(), src.size(), "t.wms", &r) == WMR_OK);
  return r;
}

std::string slurp(const char* path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("header is usable from C") { CHECK(wmr_header_check_c() == 0); }

TEST_CASE("version and error strings are never null") {
  CHECK(std::string(wmr_version()).size() > 0);
  CHECK(wmr_last_error() != nullptr);
}

TEST_CASE("report accessors") {
  Config cfg;
  wmr_report* r = analyze(cfg, kScript);
  CHECK(wmr_report_outcome(r) == WMR_TERMINATED);
  CHECK(std::string(wmr_report_reason(r)).empty());
  REQUIRE(wmr_report_entry_count(r) == 2);
  CHECK(wmr_report_epsilon_count(r) == 1);
  CHECK(std::string(wmr_report_entry_name(r, 0)) == "Grow");
  CHECK(std::string(wmr_report_entry_labels(r, 0)) == "memalloc");
  CHECK(std::string(wmr_report_entry_info(r, 0)) == "4B");
  CHECK(wmr_report_entry_line(r, 0) == 2);
  CHECK(std::string(wmr_report_entry_labels(r, 1)).empty());
  CHECK(wmr_report_warning_count(r) == 1);
  CHECK(std::string(wmr_report_warning(r, 0)).find("resetMarker") != std::string::npos);
  CHECK(wmr_report_entry_name(r, 99) == nullptr);
  CHECK(wmr_report_event_count(r) > 0);
  std::string json = wmr_report_json(r);
  CHECK(json.rfind("{\n  \"version\": 1", 0) == 0);
  CHECK(std::string(wmr_report_summary(r, 0)).find("unlabelled: Idle") != std::string::npos);
  wmr_report_destroy(r);
}

TEST_CASE("annotation through the api") {
  Config cfg;
  wmr_report* r = analyze(cfg, kScript);
  char* out = nullptr;
  REQUIRE(wmr_annotate(r, kScript.data(), kScript.size(), 0, &out) == WMR_OK);
  std::string text = out;
  wmr_string_free(out);
  CHECK(text.find("setMarker('Grow');\n//Grow::memalloc\n//[Info:4B]\n") != std::string::npos);
  CHECK(text.find("//Idle::\n") != std::string::npos);
  std::string other = "var y = 2;\n";
  CHECK(wmr_annotate(r, other.data(), other.size(), 0, &out) == WMR_ERR_HASH_MISMATCH);
  CHECK(std::string(wmr_last_error()).size() > 0);
  wmr_report_destroy(r);
}

TEST_CASE("configuration errors are status codes") {
  Config cfg;
  CHECK(wmr_config_set(cfg.c, "bogus", "1") == WMR_ERR_CONFIG);
  CHECK(std::string(wmr_last_error()).find("bogus") != std::string::npos);
  CHECK(wmr_config_set(cfg.c, "timeout_events", "x") == WMR_ERR_CONFIG);
  CHECK(wmr_config_set(nullptr, "timeout_events", "1") == WMR_ERR_INVALID_ARGUMENT);
  CHECK(wmr_config_load_file(cfg.c, "/nonexistent/cfg.json") != WMR_OK);
  char* v = nullptr;
  REQUIRE(wmr_config_get(cfg.c, "element_size", &v) == WMR_OK);
  CHECK(std::string(v) == "88");
  wmr_string_free(v);
  CHECK(wmr_config_set(cfg.c, "stack_base", "0x00401000") == WMR_OK);
  wmr_report* r = nullptr;
  CHECK(wmr_analyze_source(cfg.c, kScript.data(), kScript.size(), "t.wms", &r) == WMR_ERR_CONFIG);
  CHECK(r == nullptr);
}

TEST_CASE("parse errors and runtime outcomes") {
  Config cfg;
  wmr_report* r = nullptr;
  std::string bad = "var = ;\n";
  CHECK(wmr_analyze_source(cfg.c, bad.data(), bad.size(), "b.wms", &r) == WMR_ERR_PARSE);
  CHECK(std::string(wmr_last_error()).find("1:") != std::string::npos);

  std::string err = "setMarker('E');\nnope();\n";
  r = analyze(cfg, err);
  CHECK(wmr_report_outcome(r) == WMR_SCRIPT_ERROR);
  CHECK(wmr_report_entry_count(r) == 1);
  wmr_report_destroy(r);

  REQUIRE(wmr_config_set(cfg.c, "timeout_events", "2000") == WMR_OK);
  std::string loop = "while (true) { var a = 1; }\n";
  r = analyze(cfg, loop);
  CHECK(wmr_report_outcome(r) == WMR_TIMED_OUT);
  wmr_report_destroy(r);
}

TEST_CASE("trace written by analysis replays identically") {
  const char* trace = "capi_test_tmp.wmt";
  const char* report = "capi_test_tmp.json";
  Config cfg;
  REQUIRE(wmr_config_set(cfg.c, "trace", trace) == WMR_OK);
  wmr_report* live = analyze(cfg, kScript);
  REQUIRE(wmr_report_write(live, report) == WMR_OK);
  CHECK(slurp(report) == wmr_report_json(live));
  wmr_report* replay = nullptr;
  REQUIRE(wmr_analyze_trace(trace, -1, &replay) == WMR_OK);
  CHECK(std::string(wmr_report_json(live)) == wmr_report_json(replay));
  wmr_report_destroy(live);
  wmr_report_destroy(replay);
  CHECK(wmr_analyze_trace("/nonexistent.wmt", -1, &replay) == WMR_ERR_IO);
  {
    std::ofstream bad(trace);
    bad << "{broken\n";
  }
  CHECK(wmr_analyze_trace(trace, -1, &replay) == WMR_ERR_TRACE);
  CHECK(std::string(wmr_last_error()).find("line 1") != std::string::npos);
  std::remove(trace);
  std::remove(report);
}

TEST_CASE("null arguments are rejected") {
  wmr_report* r = nullptr;
  CHECK(wmr_analyze_source(nullptr, "x", 1, "x", &r) == WMR_ERR_INVALID_ARGUMENT);
  CHECK(wmr_config_create(nullptr) == WMR_ERR_INVALID_ARGUMENT);
  wmr_report_destroy(nullptr);
  wmr_config_destroy(nullptr);
  wmr_string_free(nullptr);
}
