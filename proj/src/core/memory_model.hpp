#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "abstract_state.hpp"
#include "events.hpp"
#include "layout.hpp"
#include "page_store.hpp"

namespace wmr {

struct AllocationRecord {
  Address addr;
  std::uint32_t size = 0;
  AllocatorKind allocator = AllocatorKind::System;
  bool live = true;
  // System record backing a custom-allocator arena.
  bool arena_chunk = false;

  std::uint64_t end() const { return std::uint64_t{addr.value} + size; }
  bool operator==(const AllocationRecord&) const = default;
};

struct Baselines {
  RegionSet code;
  RegionSet stack;
};

/// Deterministic 32-bit process address space: a first-fit system heap, a
/// custom arena allocator layered on it, and code/stack windows.
///
/// Every observable action is published on the event bus. Memory errors
/// (double free, overflow, wild access) are published as Fault events and never
/// abort; only heap exhaustion throws (OutOfMemory).
class MemoryModel {
 public:
  static constexpr std::uint32_t kAlignment = 16;

  explicit MemoryModel(const AddressSpaceConfig& layout, EventBus* bus = nullptr);

  const AddressSpaceConfig& layout() const { return layout_; }

  Baselines capture_baselines();
  bool baselines_captured() const { return code_baseline_ != nullptr; }

  Address allocate(AllocatorKind allocator, std::uint32_t size);
  void free(AllocatorKind allocator, Address addr);

  void write_bytes(Address addr, std::span<const std::uint8_t> data);
  std::vector<std::uint8_t> read_bytes(Address addr, std::uint32_t length);
  std::uint32_t read_u32(Address addr);

  void set_pc(Address addr);
  void set_sp(Address addr);
  Address pc() const { return pc_; }
  Address sp() const { return sp_; }

  AbstractState derive_state() const;

  // Mapped regions sorted by base, non-overlapping; arena chunks are carved
  // out of the system heap window.
  RegionSet enumerate_regions() const;

  std::optional<AllocationRecord> live_record(Address addr) const;
  std::optional<AllocationRecord> record_containing(Address addr) const;
  std::vector<AllocationRecord> live_records() const;
  std::vector<MemoryRegion> arena_chunks() const;

  std::uint64_t sys_heap_bytes() const { return sys_bytes_; }
  std::uint64_t custom_heap_bytes() const { return custom_bytes_; }
  bool is_mapped(Address addr) const;

  const PageStore& pages() const { return pages_; }

 private:
  struct Arena {
    Address base;
    std::uint32_t size;
    std::map<std::uint32_t, std::uint32_t> free;  // addr -> extent size
  };

  static std::optional<std::uint32_t> take_first_fit(std::map<std::uint32_t, std::uint32_t>& free_list,
                                                     std::uint32_t size);
  static void give_back(std::map<std::uint32_t, std::uint32_t>& free_list, std::uint32_t addr,
                        std::uint32_t size);

  Address allocate_system(std::uint32_t size, bool arena_chunk);
  void emit(EventPayload payload);
  void fault(FaultKind kind, Address addr);
  // Size of the mapped run starting at addr, capped at length.
  std::uint32_t mapped_prefix(Address addr, std::uint32_t length) const;

  AddressSpaceConfig layout_;
  EventBus* bus_;

  std::map<std::uint32_t, std::uint32_t> sys_free_;
  std::vector<Arena> arenas_;
  std::map<std::uint32_t, AllocationRecord> live_;
  std::set<std::uint32_t> freed_;
  std::uint64_t sys_bytes_ = 0;
  std::uint64_t custom_bytes_ = 0;
  bool any_allocation_ = false;

  PageStore pages_;
  Address pc_;
  Address sp_;
  std::shared_ptr<const RegionSet> code_baseline_;
  std::shared_ptr<const RegionSet> stack_baseline_;
};

}  // namespace wmr
