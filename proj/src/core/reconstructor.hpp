#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "abstract_state.hpp"
#include "events.hpp"
#include "primitives.hpp"

namespace wmr {

enum class CandidateKind { Simple, Compound };

std::string_view to_string(CandidateKind kind);

struct ReportEntry {
  std::string name;
  SourceSpan span;
  CandidateKind kind = CandidateKind::Simple;
  bool synthetic = false;
  int level = 0;
  std::vector<Primitive> labels;  // empty = epsilon
  std::uint64_t open_index = 0;
  std::uint64_t close_index = 0;
  std::vector<std::uint64_t> snapshot_indices;
};

// Push/pop log of the candidate stack, kept for discipline checks.
struct StackOp {
  bool push = true;
  std::size_t entry = 0;
  std::uint64_t event_index = 0;
};

/// Event-driven candidate tracker. Consumes the same event stream live or from
/// a replayed trace, so both paths yield identical entries.
class Reconstructor final : public EventListener {
 public:
  Reconstructor(AbstractState initial, DetectOptions options);
  Reconstructor(AbstractState initial, DetectOptions options, DetectorRegistry registry);

  void on_event(const TraceEvent& event) override;
  // Closes every candidate still open.
  void finish();

  // One entry per MarkerSet, in opening order.
  const std::vector<ReportEntry>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::vector<StackOp>& stack_log() const { return log_; }
  std::uint64_t fault_count() const { return faults_; }
  const AbstractState& state() const { return state_; }

 private:
  struct Open {
    std::size_t entry;
    std::vector<AbstractState> snapshots;
    int statements = 0;
    bool saw_compound = false;
  };

  void open_candidate(const MarkerSetEvent& m, std::uint64_t index);
  void close_top(std::uint64_t index);

  AbstractState state_;
  DetectOptions options_;
  DetectorRegistry registry_;
  std::vector<Open> stack_;
  std::vector<ReportEntry> entries_;
  std::vector<std::string> warnings_;
  std::vector<StackOp> log_;
  int depth_ = 0;
  std::uint64_t last_index_ = 0;
  std::uint64_t faults_ = 0;
  bool finished_ = false;
};

}  // namespace wmr
