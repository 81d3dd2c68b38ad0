#include "reconstructor.hpp"

namespace wmr {

std::string_view to_string(CandidateKind kind) { return kind == CandidateKind::Simple ? "simple" : "compound"; }

namespace {

constexpr std::string_view kSyntheticPrefix = "stmt@";

}  // namespace

Reconstructor::Reconstructor(AbstractState initial, DetectOptions options)
    : Reconstructor(std::move(initial), options, DetectorRegistry::standard()) {}

Reconstructor::Reconstructor(AbstractState initial, DetectOptions options, DetectorRegistry registry)
    : state_(std::move(initial)), options_(options), registry_(std::move(registry)) {}

void Reconstructor::on_event(const TraceEvent& event) {
  last_index_ = event.index;
  state_.event_index = event.index;
  bool state_change = true;

  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, AllocEvent>) {
          (e.allocator == AllocatorKind::System ? state_.sys_heap_bytes : state_.custom_heap_bytes) += e.size;
        } else if constexpr (std::is_same_v<T, FreeEvent>) {
          (e.allocator == AllocatorKind::System ? state_.sys_heap_bytes : state_.custom_heap_bytes) -= e.size;
        } else if constexpr (std::is_same_v<T, ExecTransferEvent>) {
          state_.pc = e.pc;
        } else if constexpr (std::is_same_v<T, StackPivotEvent>) {
          state_.sp = e.sp;
        } else {
          state_change = false;
          if constexpr (std::is_same_v<T, FaultEvent>) {
            ++faults_;
          } else if constexpr (std::is_same_v<T, MarkerSetEvent>) {
            open_candidate(e, event.index);
          } else if constexpr (std::is_same_v<T, MarkerResetEvent>) {
            if (stack_.empty()) {
              warnings_.push_back("resetMarker at " + to_string(e.span) + " with no open candidate");
            } else {
              close_top(event.index);
            }
          } else if constexpr (std::is_same_v<T, StmtBeginEvent>) {
            for (auto& o : stack_) {
              if (entries_[o.entry].level == depth_) {
                ++o.statements;
                o.saw_compound |= e.compound;
              }
            }
            ++depth_;
          } else if constexpr (std::is_same_v<T, StmtEndEvent>) {
            --depth_;
          }
        }
      },
      event.payload);

  if (state_change) {
    for (auto& o : stack_) o.snapshots.push_back(state_);
  }
}

void Reconstructor::open_candidate(const MarkerSetEvent& m, std::uint64_t index) {
  while (!stack_.empty() && entries_[stack_.back().entry].level >= depth_) close_top(index);

  ReportEntry entry;
  entry.name = m.name;
  entry.span = m.span;
  entry.synthetic = m.name.rfind(kSyntheticPrefix, 0) == 0;
  entry.level = depth_;
  entry.open_index = index;
  entries_.push_back(std::move(entry));

  Open o;
  o.entry = entries_.size() - 1;
  o.snapshots.push_back(state_);
  stack_.push_back(std::move(o));
  log_.push_back({true, entries_.size() - 1, index});
}

void Reconstructor::close_top(std::uint64_t index) {
  Open o = std::move(stack_.back());
  stack_.pop_back();
  if (index > o.snapshots.back().event_index) {
    AbstractState closing = state_;
    closing.event_index = index;
    o.snapshots.push_back(std::move(closing));
  }
  ReportEntry& entry = entries_[o.entry];
  entry.close_index = index;
  entry.kind = (o.statements > 1 || o.saw_compound) ? CandidateKind::Compound : CandidateKind::Simple;
  entry.labels = transitions_identify(registry_, o.snapshots, options_);
  entry.snapshot_indices.reserve(o.snapshots.size());
  for (const auto& s : o.snapshots) entry.snapshot_indices.push_back(s.event_index);
  log_.push_back({false, o.entry, index});
}

void Reconstructor::finish() {
  if (finished_) return;
  finished_ = true;
  while (!stack_.empty()) close_top(last_index_);
}

}  // namespace wmr
