#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abstract_state.hpp"

namespace wmr {

struct DetectOptions {
  // Count custom-allocator bytes in the monitored heap counter.
  bool aware_custom_alloc = false;
};

struct Primitive {
  std::string label;
  std::string info;
  bool operator==(const Primitive&) const = default;
};

/// One transition predicate over a (W, W') pair.
class PrimitiveDetector {
 public:
  virtual ~PrimitiveDetector() = default;
  virtual std::string_view label() const = 0;
  // Returns the info string when the transition matches.
  virtual std::optional<std::string> detect(const AbstractState& before, const AbstractState& after,
                                            const DetectOptions& options) const = 0;
};

std::unique_ptr<PrimitiveDetector> make_memalloc_detector();
std::unique_ptr<PrimitiveDetector> make_memfree_detector();
std::unique_ptr<PrimitiveDetector> make_exec_crafted_detector();
std::unique_ptr<PrimitiveDetector> make_call_stack_replace_detector();

class DetectorRegistry {
 public:
  // execCrafted, callStackReplace, memfree, memalloc
  static DetectorRegistry standard();

  // Label names must be unique; throws std::invalid_argument otherwise.
  void add(std::unique_ptr<PrimitiveDetector> detector);
  const std::vector<std::unique_ptr<PrimitiveDetector>>& detectors() const { return detectors_; }

 private:
  std::vector<std::unique_ptr<PrimitiveDetector>> detectors_;
};

std::uint64_t monitored_heap_bytes(const AbstractState& s, const DetectOptions& options);

// Every consecutive snapshot pair, every matching detector, in registry order.
std::vector<Primitive> transitions_identify(const DetectorRegistry& registry,
                                            const std::vector<AbstractState>& snapshots,
                                            const DetectOptions& options);

// 88B, 511KB, 1MB, 1.5MB
std::string format_size(std::uint64_t bytes);

// l1+l2+... ; empty for epsilon
std::string render_labels(const std::vector<Primitive>& labels);
std::string render_infos(const std::vector<Primitive>& labels);
// Runs of identical (label, info) collapse to label×N[info].
std::string render_compressed(const std::vector<Primitive>& labels);

}  // namespace wmr
