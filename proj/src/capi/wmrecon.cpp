#include "wmrecon/wmrecon.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "annotate.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "parser.hpp"
#include "report.hpp"
#include "session.hpp"

struct wmr_config {
  wmr::RunConfig config;
};

struct wmr_report {
  wmr::WMReport report;
  std::vector<std::string> labels;
  std::vector<std::string> infos;
  std::string json;
  std::string summary[2];
};

namespace {

thread_local std::string g_last_error;

wmr_status fail(wmr_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

wmr_report* wrap(wmr::WMReport report) {
  auto* r = new wmr_report{std::move(report), {}, {}, {}, {}};
  for (const auto& e : r->report.entries) {
    r->labels.push_back(wmr::render_labels(e.labels));
    r->infos.push_back(wmr::render_infos(e.labels));
  }
  r->json = wmr::report_to_json(r->report);
  r->summary[0] = wmr::summary_table(r->report, false);
  r->summary[1] = wmr::summary_table(r->report, true);
  return r;
}

bool read_file(const char* path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return static_cast<bool>(in) || in.eof();
}

// Runs fn, translating exceptions to status codes.
template <typename Fn>
wmr_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const wmr::ParseError& e) {
    return fail(WMR_ERR_PARSE, e.what());
  } catch (const wmr::ConfigError& e) {
    return fail(WMR_ERR_CONFIG, e.what());
  } catch (const wmr::TraceError& e) {
    return fail(WMR_ERR_TRACE, e.what());
  } catch (const wmr::AnnotateError& e) {
    return fail(WMR_ERR_HASH_MISMATCH, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WMR_ERR_INTERNAL, "host out of memory");
  } catch (const std::exception& e) {
    return fail(WMR_ERR_INTERNAL, e.what());
  }
}

wmr_status analyze(const wmr_config* config, std::string_view source, const std::string& name, wmr_report** out) {
  const auto& cfg = config->config;
  wmr::AnalyzeOptions options;
  std::ofstream trace;
  if (!cfg.trace_path.empty()) {
    trace.open(cfg.trace_path, std::ios::binary | std::ios::trunc);
    if (!trace) return fail(WMR_ERR_IO, "cannot write trace file '" + cfg.trace_path + "'");
    options.trace_out = &trace;
  }
  wmr::WMReport report = wmr::analyze_source(source, name, cfg, options);
  if (trace.is_open()) {
    trace.close();
    if (!trace) return fail(WMR_ERR_IO, "error writing trace file '" + cfg.trace_path + "'");
  }
  *out = wrap(std::move(report));
  return WMR_OK;
}

}  // namespace

extern "C" {

const char* wmr_version(void) { return "1.0.0"; }

const char* wmr_last_error(void) { return g_last_error.c_str(); }

wmr_status wmr_config_create(wmr_config** out) {
  if (!out) return fail(WMR_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new wmr_config{};
    return WMR_OK;
  });
}

void wmr_config_destroy(wmr_config* config) { delete config; }

wmr_status wmr_config_load_file(wmr_config* config, const char* path) {
  if (!config || !path) return fail(WMR_ERR_INVALID_ARGUMENT, "config and path are required");
  return guarded([&] {
    if (!std::filesystem::exists(path)) return fail(WMR_ERR_IO, std::string("cannot read '") + path + "'");
    config->config.load_file(path);
    return WMR_OK;
  });
}

wmr_status wmr_config_set(wmr_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(WMR_ERR_INVALID_ARGUMENT, "config, key and value are required");
  return guarded([&] {
    config->config.set(key, value);
    return WMR_OK;
  });
}

wmr_status wmr_config_get(const wmr_config* config, const char* key, char** value) {
  if (!config || !key || !value) return fail(WMR_ERR_INVALID_ARGUMENT, "config, key and value are required");
  return guarded([&] {
    *value = dup_string(config->config.get(key));
    return WMR_OK;
  });
}

wmr_status wmr_analyze_source(const wmr_config* config, const char* source, size_t length, const char* script_name,
                              wmr_report** out) {
  if (!config || !source || !out) return fail(WMR_ERR_INVALID_ARGUMENT, "config, source and out are required");
  *out = nullptr;
  return guarded(
      [&] { return analyze(config, std::string_view(source, length), script_name ? script_name : "", out); });
}

wmr_status wmr_analyze_file(const wmr_config* config, const char* path, wmr_report** out) {
  if (!config || !path || !out) return fail(WMR_ERR_INVALID_ARGUMENT, "config, path and out are required");
  *out = nullptr;
  return guarded([&] {
    std::string source;
    if (!read_file(path, source)) return fail(WMR_ERR_IO, std::string("cannot read script '") + path + "'");
    return analyze(config, source, std::filesystem::path(path).filename().string(), out);
  });
}

wmr_status wmr_analyze_trace(const char* path, int aware_override, wmr_report** out) {
  if (!path || !out) return fail(WMR_ERR_INVALID_ARGUMENT, "path and out are required");
  *out = nullptr;
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(WMR_ERR_IO, std::string("cannot read trace '") + path + "'");
    std::optional<bool> aware;
    if (aware_override >= 0) aware = aware_override != 0;
    *out = wrap(wmr::analyze_trace(in, aware));
    return WMR_OK;
  });
}

void wmr_report_destroy(wmr_report* report) { delete report; }

wmr_outcome wmr_report_outcome(const wmr_report* report) {
  if (!report) return WMR_ABORTED;
  switch (report->report.outcome.status) {
    case wmr::RunStatus::Terminated: return WMR_TERMINATED;
    case wmr::RunStatus::TimedOut: return WMR_TIMED_OUT;
    case wmr::RunStatus::ScriptError: return WMR_SCRIPT_ERROR;
    case wmr::RunStatus::Aborted: return WMR_ABORTED;
  }
  return WMR_ABORTED;
}

const char* wmr_report_reason(const wmr_report* report) { return report ? report->report.outcome.reason.c_str() : ""; }

uint64_t wmr_report_event_count(const wmr_report* report) { return report ? report->report.outcome.event_count : 0; }

size_t wmr_report_entry_count(const wmr_report* report) { return report ? report->report.entries.size() : 0; }

size_t wmr_report_epsilon_count(const wmr_report* report) { return report ? report->report.epsilon_count() : 0; }

const char* wmr_report_entry_name(const wmr_report* report, size_t index) {
  if (!report || index >= report->report.entries.size()) return nullptr;
  return report->report.entries[index].name.c_str();
}

const char* wmr_report_entry_labels(const wmr_report* report, size_t index) {
  if (!report || index >= report->labels.size()) return nullptr;
  return report->labels[index].c_str();
}

const char* wmr_report_entry_info(const wmr_report* report, size_t index) {
  if (!report || index >= report->infos.size()) return nullptr;
  return report->infos[index].c_str();
}

int wmr_report_entry_line(const wmr_report* report, size_t index) {
  if (!report || index >= report->report.entries.size()) return -1;
  return report->report.entries[index].span.line;
}

size_t wmr_report_warning_count(const wmr_report* report) { return report ? report->report.warnings.size() : 0; }

const char* wmr_report_warning(const wmr_report* report, size_t index) {
  if (!report || index >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[index].c_str();
}

const char* wmr_report_json(const wmr_report* report) { return report ? report->json.c_str() : ""; }

const char* wmr_report_summary(const wmr_report* report, int compress) {
  return report ? report->summary[compress ? 1 : 0].c_str() : "";
}

wmr_status wmr_report_write(const wmr_report* report, const char* path) {
  if (!report || !path) return fail(WMR_ERR_INVALID_ARGUMENT, "report and path are required");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return fail(WMR_ERR_IO, std::string("cannot write '") + path + "'");
  out << report->json;
  out.close();
  if (!out) return fail(WMR_ERR_IO, std::string("error writing '") + path + "'");
  return WMR_OK;
}

wmr_status wmr_annotate(const wmr_report* report, const char* source, size_t length, int compress, char** out) {
  if (!report || !source || !out) return fail(WMR_ERR_INVALID_ARGUMENT, "report, source and out are required");
  *out = nullptr;
  return guarded([&] {
    *out = dup_string(wmr::annotate(std::string_view(source, length), report->report, compress != 0));
    return WMR_OK;
  });
}

void wmr_string_free(char* s) { std::free(s); }

}  // extern "C"
