#pragma once

#include <cstdint>
#include <memory>

#include "address.hpp"

namespace wmr {

/// Derived snapshot of target memory that the primitive detectors operate on.
/// Baseline sets are frozen at capture and shared between snapshots.
struct AbstractState {
  std::uint64_t sys_heap_bytes = 0;
  std::uint64_t custom_heap_bytes = 0;
  Address pc;
  Address sp;
  std::shared_ptr<const RegionSet> code_baseline;
  std::shared_ptr<const RegionSet> stack_baseline;
  std::uint64_t event_index = 0;
};

}  // namespace wmr
