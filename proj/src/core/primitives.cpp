#include "primitives.hpp"

#include <cstdio>
#include <stdexcept>

namespace wmr {

std::uint64_t monitored_heap_bytes(const AbstractState& s, const DetectOptions& options) {
  return options.aware_custom_alloc ? s.sys_heap_bytes + s.custom_heap_bytes : s.sys_heap_bytes;
}

std::string format_size(std::uint64_t bytes) {
  constexpr std::uint64_t kKiB = 1024;
  constexpr std::uint64_t kMiB = 1024 * 1024;
  if (bytes < kKiB) return std::to_string(bytes) + "B";
  if (bytes < kMiB) return std::to_string(bytes / kKiB) + "KB";
  const std::uint64_t tenths = bytes * 10 / kMiB;
  if (tenths % 10 == 0) return std::to_string(tenths / 10) + "MB";
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "MB";
}

namespace {

class MemAlloc final : public PrimitiveDetector {
 public:
  std::string_view label() const override { return "memalloc"; }
  std::optional<std::string> detect(const AbstractState& w, const AbstractState& w2,
                                    const DetectOptions& o) const override {
    const auto a = monitored_heap_bytes(w, o);
    const auto b = monitored_heap_bytes(w2, o);
    if (b > a) return format_size(b - a);
    return std::nullopt;
  }
};

class MemFree final : public PrimitiveDetector {
 public:
  std::string_view label() const override { return "memfree"; }
  std::optional<std::string> detect(const AbstractState& w, const AbstractState& w2,
                                    const DetectOptions& o) const override {
    const auto a = monitored_heap_bytes(w, o);
    const auto b = monitored_heap_bytes(w2, o);
    if (b < a) return format_size(a - b);
    return std::nullopt;
  }
};

class ExecCrafted final : public PrimitiveDetector {
 public:
  std::string_view label() const override { return "execCrafted"; }
  std::optional<std::string> detect(const AbstractState& w, const AbstractState& w2,
                                    const DetectOptions&) const override {
    if (w2.pc == w.pc || !w2.code_baseline) return std::nullopt;
    if (region_set_contains(*w2.code_baseline, w2.pc)) return std::nullopt;
    return format_address(w2.pc);
  }
};

class CallStackReplace final : public PrimitiveDetector {
 public:
  std::string_view label() const override { return "callStackReplace"; }
  std::optional<std::string> detect(const AbstractState& w, const AbstractState& w2,
                                    const DetectOptions&) const override {
    if (w2.sp == w.sp || !w2.stack_baseline) return std::nullopt;
    if (region_set_contains(*w2.stack_baseline, w2.sp)) return std::nullopt;
    return format_address(w2.sp);
  }
};

}  // namespace

std::unique_ptr<PrimitiveDetector> make_memalloc_detector() { return std::make_unique<MemAlloc>(); }
std::unique_ptr<PrimitiveDetector> make_memfree_detector() { return std::make_unique<MemFree>(); }
std::unique_ptr<PrimitiveDetector> make_exec_crafted_detector() { return std::make_unique<ExecCrafted>(); }
std::unique_ptr<PrimitiveDetector> make_call_stack_replace_detector() {
  return std::make_unique<CallStackReplace>();
}

DetectorRegistry DetectorRegistry::standard() {
  DetectorRegistry r;
  r.add(make_exec_crafted_detector());
  r.add(make_call_stack_replace_detector());
  r.add(make_memfree_detector());
  r.add(make_memalloc_detector());
  return r;
}

void DetectorRegistry::add(std::unique_ptr<PrimitiveDetector> detector) {
  for (const auto& d : detectors_) {
    if (d->label() == detector->label()) {
      throw std::invalid_argument("duplicate detector label '" + std::string(detector->label()) + "'");
    }
  }
  detectors_.push_back(std::move(detector));
}

std::vector<Primitive> transitions_identify(const DetectorRegistry& registry,
                                            const std::vector<AbstractState>& snapshots,
                                            const DetectOptions& options) {
  std::vector<Primitive> out;
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    for (const auto& d : registry.detectors()) {
      if (auto info = d->detect(snapshots[i - 1], snapshots[i], options)) {
        out.push_back({std::string(d->label()), std::move(*info)});
      }
    }
  }
  return out;
}

std::string render_labels(const std::vector<Primitive>& labels) {
  std::string out;
  for (const auto& p : labels) {
    if (!out.empty()) out += "+";
    out += p.label;
  }
  return out;
}

std::string render_infos(const std::vector<Primitive>& labels) {
  std::string out;
  for (const auto& p : labels) {
    if (!out.empty()) out += "+";
    out += p.info;
  }
  return out;
}

std::string render_compressed(const std::vector<Primitive>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size();) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    if (!out.empty()) out += "+";
    out += labels[i].label;
    if (j - i > 1) out += "\xc3\x97" + std::to_string(j - i);
    out += "[" + labels[i].info + "]";
    i = j;
  }
  return out;
}

}  // namespace wmr
