#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "address.hpp"
#include "source_span.hpp"

namespace wmr {

enum class AllocatorKind { System, Custom };

std::string_view to_string(AllocatorKind kind);
AllocatorKind allocator_kind_from_string(std::string_view text);

enum class FaultKind { DoubleFree, InvalidFree, AllocatorMismatch, Overflow, AccessViolation };

std::string_view to_string(FaultKind kind);
FaultKind fault_kind_from_string(std::string_view text);

struct AllocEvent {
  AllocatorKind allocator = AllocatorKind::System;
  Address addr;
  std::uint32_t size = 0;
  bool operator==(const AllocEvent&) const = default;
};

struct FreeEvent {
  AllocatorKind allocator = AllocatorKind::System;
  Address addr;
  std::uint32_t size = 0;
  bool operator==(const FreeEvent&) const = default;
};

struct ExecTransferEvent {
  Address pc;
  bool operator==(const ExecTransferEvent&) const = default;
};

struct StackPivotEvent {
  Address sp;
  bool operator==(const StackPivotEvent&) const = default;
};

struct FaultEvent {
  FaultKind kind = FaultKind::AccessViolation;
  Address addr;
  bool operator==(const FaultEvent&) const = default;
};

struct MarkerSetEvent {
  std::string name;
  SourceSpan span;
  bool operator==(const MarkerSetEvent&) const = default;
};

struct MarkerResetEvent {
  SourceSpan span;
  bool operator==(const MarkerResetEvent&) const = default;
};

struct StmtBeginEvent {
  SourceSpan span;
  bool compound = false;
  bool operator==(const StmtBeginEvent&) const = default;
};

struct StmtEndEvent {
  SourceSpan span;
  bool operator==(const StmtEndEvent&) const = default;
};

using EventPayload = std::variant<AllocEvent, FreeEvent, ExecTransferEvent, StackPivotEvent, FaultEvent,
                                  MarkerSetEvent, MarkerResetEvent, StmtBeginEvent, StmtEndEvent>;

struct TraceEvent {
  std::uint64_t index = 0;
  EventPayload payload;
  bool operator==(const TraceEvent&) const = default;
};

std::string_view event_name(const EventPayload& payload);

// Heap and control events change the abstract state; everything else is bookkeeping.
inline bool is_state_event(const EventPayload& p) {
  return std::holds_alternative<AllocEvent>(p) || std::holds_alternative<FreeEvent>(p) ||
         std::holds_alternative<ExecTransferEvent>(p) || std::holds_alternative<StackPivotEvent>(p);
}

inline bool is_marker_event(const EventPayload& p) {
  return std::holds_alternative<MarkerSetEvent>(p) || std::holds_alternative<MarkerResetEvent>(p);
}

class EventListener {
 public:
  virtual ~EventListener() = default;
  virtual void on_event(const TraceEvent& event) = 0;
};

/// Assigns gap-free indices to events and fans them out to listeners.
/// The event limit is advisory: emitters poll exhausted() at safe points.
class EventBus {
 public:
  void add_listener(EventListener* listener) { listeners_.push_back(listener); }
  void remove_listener(EventListener* listener);

  std::uint64_t emit(EventPayload payload);

  std::uint64_t count() const { return next_index_; }
  void set_limit(std::uint64_t limit) { limit_ = limit; }
  bool exhausted() const { return next_index_ >= limit_; }

 private:
  std::vector<EventListener*> listeners_;
  std::uint64_t next_index_ = 0;
  std::uint64_t limit_ = std::numeric_limits<std::uint64_t>::max();
};

/// Listener that keeps every event in memory; used by tests and replay.
class EventCollector final : public EventListener {
 public:
  void on_event(const TraceEvent& event) override { events.push_back(event); }
  std::vector<TraceEvent> events;
};

}  // namespace wmr
