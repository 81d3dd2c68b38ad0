#ifndef WMRECON_H
#define WMRECON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WMR_API __declspec(dllexport)
#else
#define WMR_API __attribute__((visibility("default")))
#endif

typedef enum wmr_status {
  WMR_OK = 0,
  WMR_ERR_INVALID_ARGUMENT = 1,
  WMR_ERR_CONFIG = 2,
  WMR_ERR_IO = 3,
  WMR_ERR_PARSE = 4,
  WMR_ERR_TRACE = 5,
  WMR_ERR_HASH_MISMATCH = 6,
  WMR_ERR_INTERNAL = 7
} wmr_status;

typedef enum wmr_outcome {
  WMR_TERMINATED = 0,
  WMR_TIMED_OUT = 1,
  WMR_SCRIPT_ERROR = 2,
  WMR_ABORTED = 3
} wmr_outcome;

typedef struct wmr_config wmr_config;
typedef struct wmr_report wmr_report;

WMR_API const char* wmr_version(void);

/* Message for the last failed call on this thread; never NULL. */
WMR_API const char* wmr_last_error(void);

WMR_API wmr_status wmr_config_create(wmr_config** out);
WMR_API void wmr_config_destroy(wmr_config* config);
/* Flat JSON object; keys as for wmr_config_set. */
WMR_API wmr_status wmr_config_load_file(wmr_config* config, const char* path);
WMR_API wmr_status wmr_config_set(wmr_config* config, const char* key, const char* value);
/* Caller frees *value with wmr_string_free. */
WMR_API wmr_status wmr_config_get(const wmr_config* config, const char* key, char** value);

/* Runs a script. Script errors and timeouts still yield a report; see wmr_report_outcome.
   If the config names a trace path, the trace is written there. */
WMR_API wmr_status wmr_analyze_source(const wmr_config* config, const char* source, size_t length,
                                      const char* script_name, wmr_report** out);
WMR_API wmr_status wmr_analyze_file(const wmr_config* config, const char* path, wmr_report** out);
/* Replays a .wmt trace. aware_override: -1 keep recorded mode, 0 off, 1 on. */
WMR_API wmr_status wmr_analyze_trace(const char* path, int aware_override, wmr_report** out);

WMR_API void wmr_report_destroy(wmr_report* report);
WMR_API wmr_outcome wmr_report_outcome(const wmr_report* report);
WMR_API const char* wmr_report_reason(const wmr_report* report);
WMR_API uint64_t wmr_report_event_count(const wmr_report* report);
WMR_API size_t wmr_report_entry_count(const wmr_report* report);
WMR_API size_t wmr_report_epsilon_count(const wmr_report* report);
WMR_API const char* wmr_report_entry_name(const wmr_report* report, size_t index);
/* Canonical l*: "memalloc+memfree", empty for epsilon. */
WMR_API const char* wmr_report_entry_labels(const wmr_report* report, size_t index);
WMR_API const char* wmr_report_entry_info(const wmr_report* report, size_t index);
WMR_API int wmr_report_entry_line(const wmr_report* report, size_t index);
WMR_API size_t wmr_report_warning_count(const wmr_report* report);
WMR_API const char* wmr_report_warning(const wmr_report* report, size_t index);
/* Full report document. Valid until the report is destroyed. */
WMR_API const char* wmr_report_json(const wmr_report* report);
/* Human-readable summary; compress != 0 collapses repeated labels. */
WMR_API const char* wmr_report_summary(const wmr_report* report, int compress);
WMR_API wmr_status wmr_report_write(const wmr_report* report, const char* path);

/* Annotated copy of source; fails with WMR_ERR_HASH_MISMATCH for a foreign report.
   Caller frees *out with wmr_string_free. */
WMR_API wmr_status wmr_annotate(const wmr_report* report, const char* source, size_t length, int compress,
                                char** out);

WMR_API void wmr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
