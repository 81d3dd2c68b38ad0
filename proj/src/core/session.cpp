#include "session.hpp"

#include <ostream>

#include "annotate.hpp"
#include "auto_candidates.hpp"
#include "interpreter.hpp"
#include "memory_model.hpp"
#include "parser.hpp"
#include "reconstructor.hpp"
#include "trace_io.hpp"

namespace wmr {

WMReport analyze_source(std::string_view source, const std::string& script_name, const RunConfig& config,
                        const AnalyzeOptions& options) {
  config.validate();
  const std::string stripped = strip_annotations(source);
  Script script = parse(stripped);
  if (config.auto_candidates) script = auto_candidates(script, *config.auto_candidates);

  EventBus bus;
  MemoryModel model(config.layout, &bus);
  model.capture_baselines();
  const AbstractState initial = model.derive_state();

  WMReport report;
  report.script = script_name;
  report.script_hash = script_hash(stripped);
  report.config = config.echo();

  Reconstructor rec(initial, DetectOptions{config.aware_custom_alloc});
  bus.add_listener(&rec);
  std::optional<TraceWriter> writer;
  if (options.trace_out) {
    writer.emplace(*options.trace_out);
    writer->write_header({report.script, report.script_hash, report.config, initial});
    bus.add_listener(&*writer);
  }
  bus.set_limit(config.timeout_events);

  {
    InterpreterOptions io;
    io.element_size = config.element_size;
    Interpreter interp(script, model, bus, io);
    report.outcome = interp.run();
  }
  rec.finish();
  if (writer) writer->write_end({report.outcome});

  report.entries = rec.entries();
  report.warnings = rec.warnings();
  report.faults = rec.fault_count();
  return report;
}

WMReport analyze_trace(std::istream& in, std::optional<bool> aware_override) {
  Trace trace = read_trace(in);
  WMReport report;
  if (!trace.header) {
    report.config = RunConfig{}.echo();
    return report;
  }
  RunConfig config = RunConfig::from_echo(trace.header->config);
  if (aware_override) config.aware_custom_alloc = *aware_override;

  report.script = trace.header->script;
  report.script_hash = trace.header->script_hash;
  report.config = config.echo();
  report.outcome = trace.end->outcome;

  Reconstructor rec(trace.header->initial, DetectOptions{config.aware_custom_alloc});
  for (const auto& ev : trace.events) rec.on_event(ev);
  rec.finish();
  report.entries = rec.entries();
  report.warnings = rec.warnings();
  report.faults = rec.fault_count();
  return report;
}

}  // namespace wmr
