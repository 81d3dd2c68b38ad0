#include "events.hpp"

#include <algorithm>
#include <stdexcept>

namespace wmr {

std::string_view to_string(AllocatorKind kind) {
  return kind == AllocatorKind::System ? "System" : "Custom";
}

AllocatorKind allocator_kind_from_string(std::string_view text) {
  if (text == "System") return AllocatorKind::System;
  if (text == "Custom") return AllocatorKind::Custom;
  throw std::invalid_argument("unknown allocator '" + std::string(text) + "'");
}

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::DoubleFree: return "DoubleFree";
    case FaultKind::InvalidFree: return "InvalidFree";
    case FaultKind::AllocatorMismatch: return "AllocatorMismatch";
    case FaultKind::Overflow: return "Overflow";
    case FaultKind::AccessViolation: return "AccessViolation";
  }
  return "?";
}

FaultKind fault_kind_from_string(std::string_view text) {
  for (auto k : {FaultKind::DoubleFree, FaultKind::InvalidFree, FaultKind::AllocatorMismatch,
                 FaultKind::Overflow, FaultKind::AccessViolation}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown fault kind '" + std::string(text) + "'");
}

std::string_view event_name(const EventPayload& payload) {
  struct Visitor {
    std::string_view operator()(const AllocEvent&) const { return "Alloc"; }
    std::string_view operator()(const FreeEvent&) const { return "Free"; }
    std::string_view operator()(const ExecTransferEvent&) const { return "ExecTransfer"; }
    std::string_view operator()(const StackPivotEvent&) const { return "StackPivot"; }
    std::string_view operator()(const FaultEvent&) const { return "Fault"; }
    std::string_view operator()(const MarkerSetEvent&) const { return "MarkerSet"; }
    std::string_view operator()(const MarkerResetEvent&) const { return "MarkerReset"; }
    std::string_view operator()(const StmtBeginEvent&) const { return "StmtBegin"; }
    std::string_view operator()(const StmtEndEvent&) const { return "StmtEnd"; }
  };
  return std::visit(Visitor{}, payload);
}

void EventBus::remove_listener(EventListener* listener) {
  listeners_.erase(std::remove(listeners_.begin(), listeners_.end(), listener), listeners_.end());
}

std::uint64_t EventBus::emit(EventPayload payload) {
  TraceEvent event{next_index_++, std::move(payload)};
  for (auto* l : listeners_) l->on_event(event);
  return event.index;
}

}  // namespace wmr
