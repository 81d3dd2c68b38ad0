#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unified_diff.hpp"
#include "wmrecon/wmrecon.h"

#ifndef WMR_DEFAULT_CORPUS_DIR
#define WMR_DEFAULT_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kIo = 1, kTimedOut = 2, kScript = 3, kGolden = 4 };

struct ConfigDeleter {
  void operator()(wmr_config* c) const { wmr_config_destroy(c); }
};
struct ReportDeleter {
  void operator()(wmr_report* r) const { wmr_report_destroy(r); }
};
using ConfigPtr = std::unique_ptr<wmr_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<wmr_report, ReportDeleter>;

struct Flags {
  std::string report;
  std::string trace;
  std::string annotate;
  bool aware = false;
  std::string auto_depth;
  bool compress = false;
  std::string timeout;
  std::string config;
  std::vector<std::string> layout;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--report", f.report, "write the report document here");
  cmd->add_option("--annotate", f.annotate, "write the annotated script here");
  cmd->add_flag("--aware-custom-alloc", f.aware, "count custom-allocator bytes in heap primitives");
  cmd->add_flag("--compress-labels", f.compress, "collapse repeated labels in annotations and the summary");
  cmd->add_option("--config", f.config, "flat JSON configuration file");
}

void add_run_options(CLI::App* cmd, Flags& f) {
  cmd->add_option("--trace", f.trace, "record the event trace (.wmt) here");
  cmd->add_flag("--auto-candidates{0}", f.auto_depth, "wrap statements up to DEPTH in synthetic markers");
  cmd->add_option("--timeout-events", f.timeout, "stop after this many events");
  cmd->add_option("--layout", f.layout, "layout override KEY=VAL")->expected(1, -1);
}

int error(int code, const std::string& message) {
  std::cerr << "wmrecon: " << message << "\n";
  return code;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

int status_exit(wmr_status s) {
  switch (s) {
    case WMR_OK: return kOk;
    case WMR_ERR_PARSE: return kScript;
    default: return kIo;
  }
}

int outcome_exit(wmr_outcome o) {
  switch (o) {
    case WMR_TERMINATED: return kOk;
    case WMR_TIMED_OUT: return kTimedOut;
    default: return kScript;
  }
}

// Returns 0 on success, else an exit code after printing the error.
int build_config(const Flags& f, ConfigPtr& out, bool run_flags) {
  wmr_config* raw = nullptr;
  if (wmr_config_create(&raw) != WMR_OK) return error(kIo, wmr_last_error());
  out.reset(raw);
  if (!f.config.empty()) {
    if (auto s = wmr_config_load_file(raw, f.config.c_str()); s != WMR_OK) return error(kIo, wmr_last_error());
  }
  auto set = [&](const std::string& k, const std::string& v) {
    if (wmr_config_set(raw, k.c_str(), v.c_str()) != WMR_OK) return error(kIo, wmr_last_error());
    return 0;
  };
  if (f.aware) {
    if (int rc = set("aware_custom_alloc", "true")) return rc;
  }
  if (f.compress) {
    if (int rc = set("compress_labels", "true")) return rc;
  }
  if (!run_flags) return 0;
  if (!f.auto_depth.empty()) {
    if (int rc = set("auto_candidates", f.auto_depth)) return rc;
  }
  if (!f.timeout.empty()) {
    if (int rc = set("timeout_events", f.timeout)) return rc;
  }
  for (const auto& kv : f.layout) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) return error(kIo, "--layout expects KEY=VAL, got '" + kv + "'");
    if (int rc = set(kv.substr(0, eq), kv.substr(eq + 1))) return rc;
  }
  if (!f.trace.empty()) {
    if (int rc = set("trace", f.trace)) return rc;
  }
  return 0;
}

bool config_flag(const wmr_config* c, const char* key) {
  char* v = nullptr;
  if (wmr_config_get(c, key, &v) != WMR_OK) return false;
  bool on = std::string(v) == "true";
  wmr_string_free(v);
  return on;
}

std::string config_value(const wmr_config* c, const char* key) {
  char* v = nullptr;
  if (wmr_config_get(c, key, &v) != WMR_OK) return "";
  std::string s = v;
  wmr_string_free(v);
  return s;
}

int write_outputs(const wmr_report* report, const std::string& report_path, const std::string& annotate_path,
                  const std::string& source, bool compress) {
  if (!report_path.empty() && wmr_report_write(report, report_path.c_str()) != WMR_OK) {
    return error(kIo, wmr_last_error());
  }
  if (!annotate_path.empty()) {
    char* annotated = nullptr;
    if (wmr_annotate(report, source.data(), source.size(), compress, &annotated) != WMR_OK) {
      return error(kIo, wmr_last_error());
    }
    bool ok = write_file(annotate_path, annotated);
    wmr_string_free(annotated);
    if (!ok) return error(kIo, "cannot write '" + annotate_path + "'");
  }
  return 0;
}

int cmd_run(const std::string& script, const Flags& f) {
  ConfigPtr config;
  if (int rc = build_config(f, config, true)) return rc;
  const std::string report_path = f.report.empty() ? config_value(config.get(), "report") : f.report;
  const std::string annotate_path = f.annotate.empty() ? config_value(config.get(), "annotate") : f.annotate;
  const bool compress = config_flag(config.get(), "compress_labels");

  std::string source;
  if (!read_file(script, source)) return error(kIo, "cannot read script '" + script + "'");
  wmr_report* raw = nullptr;
  wmr_status s = wmr_analyze_source(config.get(), source.data(), source.size(),
                                    fs::path(script).filename().string().c_str(), &raw);
  if (s != WMR_OK) return error(status_exit(s), wmr_last_error());
  ReportPtr report(raw);

  std::cout << wmr_report_summary(report.get(), compress);
  if (int rc = write_outputs(report.get(), report_path, annotate_path, source, compress)) return rc;
  return outcome_exit(wmr_report_outcome(report.get()));
}

int cmd_analyze(const std::string& trace, const std::string& script, const Flags& f) {
  ConfigPtr config;
  if (int rc = build_config(f, config, false)) return rc;
  const bool compress = config_flag(config.get(), "compress_labels");
  const int aware = f.aware || config_flag(config.get(), "aware_custom_alloc") ? 1 : -1;

  wmr_report* raw = nullptr;
  if (wmr_analyze_trace(trace.c_str(), aware, &raw) != WMR_OK) return error(kIo, wmr_last_error());
  ReportPtr report(raw);
  std::cout << wmr_report_summary(report.get(), compress);

  std::string source;
  if (!f.annotate.empty()) {
    if (script.empty()) return error(kIo, "--annotate needs --script for trace analysis");
    if (!read_file(script, source)) return error(kIo, "cannot read script '" + script + "'");
  }
  if (int rc = write_outputs(report.get(), f.report, f.annotate, source, compress)) return rc;
  return outcome_exit(wmr_report_outcome(report.get()));
}

int cmd_corpus(const std::string& dir, const Flags& f, bool update) {
  static const char* kCases[] = {"spray", "uaf", "pivot"};
  ConfigPtr config;
  if (int rc = build_config(f, config, false)) return rc;
  const bool aware = config_flag(config.get(), "aware_custom_alloc");
  const fs::path golden_dir = fs::path(dir) / "golden" / (aware ? "aware" : "");
  const fs::path trace_dir = fs::path(dir) / "golden" / "traces";

  bool all_pass = true;
  for (const char* name : kCases) {
    const fs::path script = fs::path(dir) / (std::string(name) + ".wms");
    std::string source;
    if (!read_file(script.string(), source)) return error(kIo, "cannot read corpus script '" + script.string() + "'");

    if (update && !aware) {
      fs::create_directories(trace_dir);
      wmr_config_set(config.get(), "trace", (trace_dir / (std::string(name) + ".wmt")).string().c_str());
    } else {
      wmr_config_set(config.get(), "trace", "");
    }
    wmr_report* raw = nullptr;
    wmr_status s = wmr_analyze_source(config.get(), source.data(), source.size(), script.filename().string().c_str(), &raw);
    if (s != WMR_OK) return error(status_exit(s), wmr_last_error());
    ReportPtr report(raw);
    const std::string actual = wmr_report_json(report.get());
    const fs::path golden = golden_dir / (std::string(name) + ".json");

    if (update) {
      fs::create_directories(golden_dir);
      if (!write_file(golden.string(), actual)) return error(kIo, "cannot write '" + golden.string() + "'");
      std::cout << "UPDATED " << name << "\n";
      continue;
    }

    std::string expected;
    if (!read_file(golden.string(), expected)) expected.clear();
    std::string diff = wmr::tools::unified_diff(expected, actual, golden.string(), "actual/" + std::string(name));

    // Recorded traces must replay to the same golden.
    const fs::path trace = trace_dir / (std::string(name) + ".wmt");
    if (diff.empty() && !aware && fs::exists(trace)) {
      wmr_report* replayed = nullptr;
      if (wmr_analyze_trace(trace.string().c_str(), -1, &replayed) != WMR_OK) {
        diff = std::string("replay failed: ") + wmr_last_error() + "\n";
      } else {
        diff = wmr::tools::unified_diff(expected, wmr_report_json(replayed), golden.string(),
                                        "replay/" + std::string(name));
        wmr_report_destroy(replayed);
      }
    }

    if (diff.empty()) {
      std::cout << "PASS " << name << "\n";
    } else {
      all_pass = false;
      std::cout << "FAIL " << name << "\n" << diff;
    }
  }
  return all_pass ? kOk : kGolden;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weird-machine reconstruction for marked exploit scripts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wmr_version());

  Flags run_flags;
  std::string run_script;
  auto* run = app.add_subcommand("run", "execute a script and reconstruct its weird machine");
  run->add_option("script", run_script, "script (.wms)")->required();
  add_common(run, run_flags);
  add_run_options(run, run_flags);

  Flags analyze_flags;
  std::string trace_path;
  std::string analyze_script;
  auto* analyze = app.add_subcommand("analyze", "rebuild the report from a recorded trace");
  analyze->add_option("trace", trace_path, "trace (.wmt)")->required();
  analyze->add_option("--script", analyze_script, "source script, needed for --annotate");
  add_common(analyze, analyze_flags);

  Flags corpus_flags;
  std::string corpus_dir = WMR_DEFAULT_CORPUS_DIR;
  bool update = false;
  auto* corpus = app.add_subcommand("corpus", "run the bundled analogs and compare against goldens");
  corpus->add_option("--corpus-dir", corpus_dir, "corpus directory");
  corpus->add_flag("--update", update, "rewrite the golden files");
  corpus->add_flag("--aware-custom-alloc", corpus_flags.aware, "use the aware-mode golden set");
  corpus->add_option("--config", corpus_flags.config, "flat JSON configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kIo;
  }

  try {
    if (*run) return cmd_run(run_script, run_flags);
    if (*analyze) return cmd_analyze(trace_path, analyze_script, analyze_flags);
    if (*corpus) return cmd_corpus(corpus_dir, corpus_flags, update);
  } catch (const std::exception& e) {
    return error(kIo, e.what());
  }
  return kIo;
}
