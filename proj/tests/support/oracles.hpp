#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abstract_state.hpp"
#include "events.hpp"
#include "primitives.hpp"
#include "reconstructor.hpp"
#include "trace_io.hpp"

namespace wmr::testing {

// Linear scan, no shared helpers with the production code.
inline bool in_any(const RegionSet& regions, std::uint32_t a) {
  for (const auto& r : regions) {
    std::uint64_t lo = r.base.value;
    std::uint64_t hi = lo + r.size;
    if (a >= lo && a < hi) return true;
  }
  return false;
}

inline std::uint64_t counter(const AbstractState& s, bool aware) {
  return aware ? s.sys_heap_bytes + s.custom_heap_bytes : s.sys_heap_bytes;
}

// Direct evaluation of the four transition constraints, in registry order.
inline std::vector<std::string> oracle_labels(const AbstractState& w, const AbstractState& w2, bool aware) {
  std::vector<std::string> out;
  if (w2.pc.value != w.pc.value && !in_any(*w2.code_baseline, w2.pc.value)) out.push_back("execCrafted");
  if (w2.sp.value != w.sp.value && !in_any(*w2.stack_baseline, w2.sp.value)) out.push_back("callStackReplace");
  if (counter(w2, aware) < counter(w, aware)) out.push_back("memfree");
  if (counter(w2, aware) > counter(w, aware)) out.push_back("memalloc");
  return out;
}

// Brute-force ledger over a trace: state after every event.
struct Ledger {
  AbstractState state;
  std::map<std::uint32_t, std::uint32_t> live_sys;
  std::map<std::uint32_t, std::uint32_t> live_custom;

  void apply(const TraceEvent& ev) {
    if (auto a = std::get_if<AllocEvent>(&ev.payload)) {
      auto& live = a->allocator == AllocatorKind::System ? live_sys : live_custom;
      live[a->addr.value] = a->size;
    } else if (auto f = std::get_if<FreeEvent>(&ev.payload)) {
      auto& live = f->allocator == AllocatorKind::System ? live_sys : live_custom;
      live.erase(f->addr.value);
    } else if (auto x = std::get_if<ExecTransferEvent>(&ev.payload)) {
      state.pc = x->pc;
    } else if (auto p = std::get_if<StackPivotEvent>(&ev.payload)) {
      state.sp = p->sp;
    }
    std::uint64_t sys = 0, custom = 0;
    for (auto& [addr, size] : live_sys) sys += size;
    for (auto& [addr, size] : live_custom) custom += size;
    state.sys_heap_bytes = sys;
    state.custom_heap_bytes = custom;
    state.event_index = ev.index;
  }
};

// Labels a candidate spanning [open, close] should carry, recomputed from raw events.
inline std::vector<std::string> oracle_entry_labels(const Trace& trace, std::uint64_t open, std::uint64_t close,
                                                    bool aware) {
  Ledger ledger;
  ledger.state = trace.header->initial;
  std::vector<std::string> out;
  for (const auto& ev : trace.events) {
    AbstractState before = ledger.state;
    ledger.apply(ev);
    if (ev.index <= open || ev.index > close || !is_state_event(ev.payload)) continue;
    for (auto& l : oracle_labels(before, ledger.state, aware)) out.push_back(l);
  }
  return out;
}

inline std::vector<std::string> label_names(const std::vector<Primitive>& labels) {
  std::vector<std::string> out;
  for (const auto& p : labels) out.push_back(p.label);
  return out;
}

// Number of allocator events strictly inside (open, close].
inline std::size_t allocator_events(const Trace& trace, std::uint64_t open, std::uint64_t close, bool aware) {
  std::size_t n = 0;
  for (const auto& ev : trace.events) {
    if (ev.index <= open || ev.index > close) continue;
    AllocatorKind k;
    if (auto a = std::get_if<AllocEvent>(&ev.payload)) {
      k = a->allocator;
    } else if (auto f = std::get_if<FreeEvent>(&ev.payload)) {
      k = f->allocator;
    } else {
      continue;
    }
    if (aware || k == AllocatorKind::System) ++n;
  }
  return n;
}

struct DisciplineResult {
  bool lifo = true;
  bool laminar = true;
  bool open_matches_marker = true;
  bool snapshots_increase = true;
  std::size_t marker_sets = 0;
  std::string detail;
};

// Checks the candidate-stack discipline of a reconstructed run against its trace.
inline DisciplineResult check_discipline(const std::vector<ReportEntry>& entries, const std::vector<StackOp>& log,
                                         const std::vector<TraceEvent>& events) {
  DisciplineResult r;
  std::vector<std::uint64_t> marker_indices;
  for (const auto& ev : events) {
    if (std::holds_alternative<MarkerSetEvent>(ev.payload)) marker_indices.push_back(ev.index);
  }
  r.marker_sets = marker_indices.size();

  std::vector<std::size_t> stack;
  std::vector<int> pushes(entries.size(), 0), pops(entries.size(), 0);
  for (const auto& op : log) {
    if (op.entry >= entries.size()) {
      r.lifo = false;
      r.detail = "log names unknown entry";
      return r;
    }
    if (op.push) {
      stack.push_back(op.entry);
      ++pushes[op.entry];
    } else {
      if (stack.empty() || stack.back() != op.entry) {
        r.lifo = false;
        r.detail = "pop of non-top entry " + entries[op.entry].name;
      } else {
        stack.pop_back();
      }
      ++pops[op.entry];
    }
  }
  if (!stack.empty()) {
    r.lifo = false;
    r.detail = "entries left open";
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (pushes[i] != 1 || pops[i] != 1) {
      r.lifo = false;
      r.detail = "entry " + entries[i].name + " not pushed/popped exactly once";
    }
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& a = entries[i];
    if (i >= marker_indices.size() || a.open_index != marker_indices[i]) r.open_matches_marker = false;
    std::uint64_t prev = 0;
    bool first = true;
    for (auto s : a.snapshot_indices) {
      if ((!first && s <= prev) || s < a.open_index || s > a.close_index) r.snapshots_increase = false;
      prev = s;
      first = false;
    }
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      const auto& b = entries[j];
      bool disjoint = a.close_index <= b.open_index || b.close_index <= a.open_index;
      bool nested = a.open_index <= b.open_index && b.close_index <= a.close_index;
      if (!disjoint && !nested) {
        r.laminar = false;
        r.detail = a.name + " and " + b.name + " overlap without nesting";
      }
    }
  }
  return r;
}

// Random scripts mixing nested control flow, calls, allocations and markers.
class ScriptGenerator {
 public:
  explicit ScriptGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string generate() {
    std::ostringstream out;
    next_marker_ = 0;
    out << "var x = 0;\nvar keep = new Array();\nvar s = null;\n";
    const int functions = pick(0, 3);
    for (int f = 0; f < functions; ++f) {
      out << "function f" << f << "() {\n";
      callable_ = f;
      block(out, 1, 3);
      out << "}\n";
    }
    callable_ = functions;
    block(out, 0, 4);
    return out.str();
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  void indent(std::ostringstream& out, int depth) {
    for (int i = 0; i < depth; ++i) out << "  ";
  }

  void block(std::ostringstream& out, int depth, int max_depth) {
    const int n = pick(1, 5);
    for (int i = 0; i < n; ++i) statement(out, depth, max_depth);
  }

  void statement(std::ostringstream& out, int depth, int max_depth) {
    int choice = pick(0, depth >= max_depth ? 7 : 10);
    indent(out, depth);
    switch (choice) {
      case 0:
      case 1:
        // Repeated names exercise suffix de-duplication.
        out << "setMarker('m" << (next_marker_++ % 7) << "');\n";
        break;
      case 2:
        out << "resetMarker();\n";
        break;
      case 3:
        out << "s = unescape('%u4141%u" << std::hex << pick(0x1000, 0xffff) << std::dec << "');\n";
        break;
      case 4:
        out << "keep.push(unescape('%u4242%u4343'));\n";
        break;
      case 5:
        out << "if (keep.length > 0) { keep.pop(); }\n";
        break;
      case 6:
        out << (pick(0, 1) ? "domCreate('div');\n" : "x = x + 1;\n");
        break;
      case 7:
        if (callable_ > 0) {
          out << "f" << pick(0, callable_ - 1) << "();\n";
        } else {
          out << "collectGarbage();\n";
        }
        break;
      case 8:
        out << "if (x % 2 == 0) {\n";
        block(out, depth + 1, max_depth);
        indent(out, depth);
        out << "} else {\n";
        block(out, depth + 1, max_depth);
        indent(out, depth);
        out << "}\n";
        break;
      case 9: {
        const int v = depth;
        out << "for (var i" << v << " = 0; i" << v << " < " << pick(0, 3) << "; i" << v << "++) {\n";
        block(out, depth + 1, max_depth);
        indent(out, depth);
        out << "}\n";
        break;
      }
      default:
        out << "{\n";
        block(out, depth + 1, max_depth);
        indent(out, depth);
        out << "}\n";
        break;
    }
  }

  std::mt19937_64 rng_;
  int next_marker_ = 0;
  int callable_ = 0;
};

// Random snapshot pair with registers biased toward the baseline boundaries.
class StatePairGenerator {
 public:
  StatePairGenerator(std::uint64_t seed, std::shared_ptr<const RegionSet> code, std::shared_ptr<const RegionSet> stack)
      : rng_(seed), code_(std::move(code)), stack_(std::move(stack)) {}

  std::pair<AbstractState, AbstractState> next() {
    AbstractState w, w2;
    w.code_baseline = w2.code_baseline = code_;
    w.stack_baseline = w2.stack_baseline = stack_;
    w.event_index = pick(0, 1000);
    w2.event_index = w.event_index + 1 + pick(0, 10);
    w.sys_heap_bytes = heap();
    w.custom_heap_bytes = heap();
    w2.sys_heap_bytes = pick(0, 3) == 0 ? w.sys_heap_bytes : heap();
    w2.custom_heap_bytes = pick(0, 3) == 0 ? w.custom_heap_bytes : heap();
    w.pc = address(*code_);
    w.sp = address(*stack_);
    w2.pc = pick(0, 2) == 0 ? w.pc : address(*code_);
    w2.sp = pick(0, 2) == 0 ? w.sp : address(*stack_);
    return {w, w2};
  }

 private:
  std::uint32_t pick(std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng_);
  }

  std::uint64_t heap() {
    static const std::uint64_t kSmall[] = {0, 1, 88, 1023, 1024, 1u << 20};
    if (pick(0, 1)) return kSmall[pick(0, 5)];
    return pick(0, 0x3fffffff);
  }

  Address address(const RegionSet& regions) {
    switch (pick(0, 3)) {
      case 0: return Address{pick(0, 0xffffffffu)};
      case 1: {
        const auto& r = regions[pick(0, static_cast<std::uint32_t>(regions.size() - 1))];
        return Address{r.base.value + pick(0, r.size - 1)};
      }
      case 2: {
        const auto& r = regions[pick(0, static_cast<std::uint32_t>(regions.size() - 1))];
        std::uint64_t edge = pick(0, 1) ? std::uint64_t{r.base.value} - pick(0, 1) : r.end() - pick(0, 1);
        return Address{static_cast<std::uint32_t>(edge)};
      }
      default: return Address{0x0c0d0c0d};
    }
  }

  std::mt19937_64 rng_;
  std::shared_ptr<const RegionSet> code_;
  std::shared_ptr<const RegionSet> stack_;
};

}  // namespace wmr::testing
