#include "trace_io.hpp"

#include <istream>
#include <ostream>

#include "errors.hpp"

namespace wmr {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json span_json(const SourceSpan& s) { return ordered_json::array({s.line, s.column, s.length}); }

SourceSpan span_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("span must be [line, column, length]");
  return {j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>(), j[2].get<std::uint32_t>()};
}

Address address_from(const json& j) {
  return Address{static_cast<std::uint32_t>(parse_integer(j.get<std::string>()))};
}

ordered_json regions_json(const RegionSet& regions) {
  ordered_json out = ordered_json::array();
  for (const auto& r : regions) {
    ordered_json j;
    j["label"] = r.label;
    j["kind"] = std::string(to_string(r.kind));
    j["base"] = format_address(r.base);
    j["size"] = r.size;
    out.push_back(j);
  }
  return out;
}

std::shared_ptr<const RegionSet> regions_from(const json& j) {
  RegionSet out;
  for (const auto& r : j) {
    out.push_back({address_from(r.at("base")), r.at("size").get<std::uint32_t>(),
                   region_kind_from_string(r.at("kind").get<std::string>()), r.at("label").get<std::string>()});
  }
  return std::make_shared<const RegionSet>(std::move(out));
}

}  // namespace

std::string encode_event(const TraceEvent& event) {
  ordered_json j;
  j["v"] = kTraceVersion;
  j["i"] = event.index;
  j["ev"] = std::string(event_name(event.payload));
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, AllocEvent> || std::is_same_v<T, FreeEvent>) {
          j["allocator"] = std::string(to_string(e.allocator));
          j["addr"] = format_address(e.addr);
          j["size"] = e.size;
        } else if constexpr (std::is_same_v<T, ExecTransferEvent>) {
          j["pc"] = format_address(e.pc);
        } else if constexpr (std::is_same_v<T, StackPivotEvent>) {
          j["sp"] = format_address(e.sp);
        } else if constexpr (std::is_same_v<T, FaultEvent>) {
          j["kind"] = std::string(to_string(e.kind));
          j["addr"] = format_address(e.addr);
        } else if constexpr (std::is_same_v<T, MarkerSetEvent>) {
          j["name"] = e.name;
          j["span"] = span_json(e.span);
        } else if constexpr (std::is_same_v<T, MarkerResetEvent> || std::is_same_v<T, StmtEndEvent>) {
          j["span"] = span_json(e.span);
        } else if constexpr (std::is_same_v<T, StmtBeginEvent>) {
          j["span"] = span_json(e.span);
          j["compound"] = e.compound;
        }
      },
      event.payload);
  return j.dump();
}

TraceEvent decode_event(const json& r, std::size_t line) {
  TraceEvent ev;
  try {
    ev.index = r.at("i").get<std::uint64_t>();
    const auto name = r.at("ev").get<std::string>();
    if (name == "Alloc") {
      ev.payload = AllocEvent{allocator_kind_from_string(r.at("allocator").get<std::string>()),
                              address_from(r.at("addr")), r.at("size").get<std::uint32_t>()};
    } else if (name == "Free") {
      ev.payload = FreeEvent{allocator_kind_from_string(r.at("allocator").get<std::string>()),
                             address_from(r.at("addr")), r.at("size").get<std::uint32_t>()};
    } else if (name == "ExecTransfer") {
      ev.payload = ExecTransferEvent{address_from(r.at("pc"))};
    } else if (name == "StackPivot") {
      ev.payload = StackPivotEvent{address_from(r.at("sp"))};
    } else if (name == "Fault") {
      ev.payload = FaultEvent{fault_kind_from_string(r.at("kind").get<std::string>()), address_from(r.at("addr"))};
    } else if (name == "MarkerSet") {
      ev.payload = MarkerSetEvent{r.at("name").get<std::string>(), span_from(r.at("span"))};
    } else if (name == "MarkerReset") {
      ev.payload = MarkerResetEvent{span_from(r.at("span"))};
    } else if (name == "StmtBegin") {
      ev.payload = StmtBeginEvent{span_from(r.at("span")), r.at("compound").get<bool>()};
    } else if (name == "StmtEnd") {
      ev.payload = StmtEndEvent{span_from(r.at("span"))};
    } else {
      throw TraceError(line, "unknown event type '" + name + "'");
    }
  } catch (const json::exception& e) {
    throw TraceError(line, std::string("malformed event record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw TraceError(line, std::string("malformed event record: ") + e.what());
  }
  return ev;
}

void TraceWriter::write_header(const TraceHeader& h) {
  ordered_json j;
  j["v"] = kTraceVersion;
  j["record"] = "header";
  j["script"] = h.script;
  j["script_hash"] = h.script_hash;
  j["config"] = h.config;
  ordered_json init;
  init["pc"] = format_address(h.initial.pc);
  init["sp"] = format_address(h.initial.sp);
  init["sys_heap_bytes"] = h.initial.sys_heap_bytes;
  init["custom_heap_bytes"] = h.initial.custom_heap_bytes;
  init["code_baseline"] = regions_json(h.initial.code_baseline ? *h.initial.code_baseline : RegionSet{});
  init["stack_baseline"] = regions_json(h.initial.stack_baseline ? *h.initial.stack_baseline : RegionSet{});
  j["initial"] = init;
  out_ << j.dump() << '\n';
}

void TraceWriter::on_event(const TraceEvent& event) { out_ << encode_event(event) << '\n'; }

void TraceWriter::write_end(const TraceEnd& end) {
  ordered_json j;
  j["v"] = kTraceVersion;
  j["record"] = "end";
  j["outcome"] = std::string(to_string(end.outcome.status));
  j["reason"] = end.outcome.reason;
  j["location"] = end.outcome.status == RunStatus::ScriptError ? ordered_json(to_string(end.outcome.location))
                                                                : ordered_json();
  j["events"] = end.outcome.event_count;
  out_ << j.dump() << '\n';
  out_.flush();
}

bool TraceWriter::ok() const { return static_cast<bool>(out_); }

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty() || text == "\r") {
      throw TraceError(line_no, "blank line");
    }
    if (trace.end) throw TraceError(line_no, "record after end of trace");

    json r;
    try {
      r = json::parse(text);
    } catch (const json::exception&) {
      throw TraceError(line_no, "not a JSON record (truncated?)");
    }
    if (!r.is_object() || !r.contains("v") || r["v"] != kTraceVersion) {
      throw TraceError(line_no, "missing or unsupported version");
    }

    if (!trace.header) {
      if (r.value("record", "") != "header") throw TraceError(line_no, "first record must be the header");
      try {
        TraceHeader h;
        h.script = r.at("script").get<std::string>();
        h.script_hash = r.at("script_hash").get<std::string>();
        h.config = r.at("config");
        const auto& init = r.at("initial");
        h.initial.pc = address_from(init.at("pc"));
        h.initial.sp = address_from(init.at("sp"));
        h.initial.sys_heap_bytes = init.at("sys_heap_bytes").get<std::uint64_t>();
        h.initial.custom_heap_bytes = init.at("custom_heap_bytes").get<std::uint64_t>();
        h.initial.code_baseline = regions_from(init.at("code_baseline"));
        h.initial.stack_baseline = regions_from(init.at("stack_baseline"));
        trace.header = std::move(h);
      } catch (const std::exception& e) {
        throw TraceError(line_no, std::string("malformed header: ") + e.what());
      }
      continue;
    }

    if (r.contains("record")) {
      if (r["record"] != "end") throw TraceError(line_no, "unexpected record type");
      TraceEnd end;
      try {
        end.outcome.status = run_status_from_string(r.at("outcome").get<std::string>());
        end.outcome.reason = r.at("reason").get<std::string>();
        if (!r.at("location").is_null()) {
          auto loc = r.at("location").get<std::string>();
          auto colon = loc.find(':');
          end.outcome.location = {static_cast<std::uint32_t>(std::stoul(loc.substr(0, colon))),
                                  static_cast<std::uint32_t>(std::stoul(loc.substr(colon + 1))), 0};
        }
        end.outcome.event_count = r.at("events").get<std::uint64_t>();
      } catch (const std::exception& e) {
        throw TraceError(line_no, std::string("malformed end record: ") + e.what());
      }
      if (end.outcome.event_count != trace.events.size()) {
        throw TraceError(line_no, "end record counts " + std::to_string(end.outcome.event_count) + " events, found " +
                                      std::to_string(trace.events.size()));
      }
      trace.end = std::move(end);
      continue;
    }

    TraceEvent ev = decode_event(r, line_no);
    if (ev.index != trace.events.size()) {
      throw TraceError(line_no, "index gap: expected " + std::to_string(trace.events.size()) + ", found " +
                                    std::to_string(ev.index));
    }
    trace.events.push_back(std::move(ev));
  }
  if (trace.header && !trace.end) throw TraceError(line_no + 1, "truncated trace: missing end record");
  return trace;
}

}  // namespace wmr
