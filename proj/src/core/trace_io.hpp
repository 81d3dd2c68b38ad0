#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "abstract_state.hpp"
#include "events.hpp"
#include "interpreter.hpp"

namespace wmr {

inline constexpr int kTraceVersion = 1;

struct TraceHeader {
  std::string script;
  std::string script_hash;
  nlohmann::ordered_json config;  // RunConfig::echo()
  AbstractState initial;
};

struct TraceEnd {
  RunOutcome outcome;
};

/// Line-delimited JSON: one header record, one record per event, one end record.
class TraceWriter final : public EventListener {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}

  void write_header(const TraceHeader& header);
  void on_event(const TraceEvent& event) override;
  void write_end(const TraceEnd& end);

  bool ok() const;

 private:
  std::ostream& out_;
};

struct Trace {
  std::optional<TraceHeader> header;  // absent for an empty file
  std::vector<TraceEvent> events;
  std::optional<TraceEnd> end;
};

std::string encode_event(const TraceEvent& event);
// Throws TraceError(line, ...) on malformed input.
TraceEvent decode_event(const nlohmann::json& record, std::size_t line);

// Integrity checks: header first, gap-free indices from 0, matching end
// record, nothing after it. An empty stream is a valid empty trace.
Trace read_trace(std::istream& in);

}  // namespace wmr
