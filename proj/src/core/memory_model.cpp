#include "memory_model.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "errors.hpp"

namespace wmr {

namespace {

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

}  // namespace

MemoryModel::MemoryModel(const AddressSpaceConfig& layout, EventBus* bus) : bus_(bus) {
  validate(layout);
  layout_ = apply_aslr(layout);
  // The heap window is used from an aligned base; the tail below alignment is dropped.
  const std::uint64_t start = align_up(layout_.heap.base.value, kAlignment);
  const std::uint64_t end = layout_.heap.base.value + std::uint64_t{layout_.heap.size};
  if (start < end) {
    sys_free_.emplace(static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(end - start));
  }
  pc_ = layout_.code.front().base;
  const auto& stack = layout_.stack.front();
  sp_ = Address{stack.base.value + stack.size - kInitialStackHeadroom};
}

Baselines MemoryModel::capture_baselines() {
  if (baselines_captured()) throw StateError("baselines already captured");
  if (any_allocation_) throw StateError("baselines must be captured before the first allocation");
  Baselines b;
  for (const auto& r : layout_.code) b.code.push_back({r.base, r.size, RegionKind::Code, r.label});
  for (const auto& r : layout_.stack) b.stack.push_back({r.base, r.size, RegionKind::Stack, r.label});
  code_baseline_ = std::make_shared<const RegionSet>(b.code);
  stack_baseline_ = std::make_shared<const RegionSet>(b.stack);
  return b;
}

void MemoryModel::emit(EventPayload payload) {
  if (bus_) bus_->emit(std::move(payload));
}

void MemoryModel::fault(FaultKind kind, Address addr) { emit(FaultEvent{kind, addr}); }

std::optional<std::uint32_t> MemoryModel::take_first_fit(std::map<std::uint32_t, std::uint32_t>& free_list,
                                                         std::uint32_t size) {
  for (auto it = free_list.begin(); it != free_list.end(); ++it) {
    if (it->second < size) continue;
    const std::uint32_t addr = it->first;
    const std::uint32_t remaining = it->second - size;
    free_list.erase(it);
    if (remaining > 0) free_list.emplace(addr + size, remaining);
    return addr;
  }
  return std::nullopt;
}

void MemoryModel::give_back(std::map<std::uint32_t, std::uint32_t>& free_list, std::uint32_t addr,
                            std::uint32_t size) {
  auto [it, inserted] = free_list.emplace(addr, size);
  if (!inserted) throw std::logic_error("free extent inserted twice");
  auto next = std::next(it);
  if (next != free_list.end() && std::uint64_t{it->first} + it->second == next->first) {
    it->second += next->second;
    free_list.erase(next);
  }
  if (it != free_list.begin()) {
    auto prev = std::prev(it);
    if (std::uint64_t{prev->first} + prev->second == it->first) {
      prev->second += it->second;
      free_list.erase(it);
    }
  }
}

Address MemoryModel::allocate_system(std::uint32_t size, bool arena_chunk) {
  const std::uint64_t reserved = align_up(size, kAlignment);
  if (reserved > 0xffffffffull) throw OutOfMemory("allocation of " + std::to_string(size) + " bytes");
  auto addr = take_first_fit(sys_free_, static_cast<std::uint32_t>(reserved));
  if (!addr) {
    throw OutOfMemory("system heap exhausted allocating " + std::to_string(size) + " bytes");
  }
  sys_bytes_ += size;
  freed_.erase(*addr);
  if (arena_chunk) {
    arenas_.push_back({Address{*addr}, size, {{*addr, size}}});
  } else {
    live_.emplace(*addr, AllocationRecord{Address{*addr}, size, AllocatorKind::System, true, false});
  }
  emit(AllocEvent{AllocatorKind::System, Address{*addr}, size});
  return Address{*addr};
}

Address MemoryModel::allocate(AllocatorKind allocator, std::uint32_t size) {
  if (size == 0) throw std::invalid_argument("allocation size must be positive");
  any_allocation_ = true;
  if (allocator == AllocatorKind::System || size >= layout_.bypass_threshold) {
    return allocate_system(size, false);
  }

  const auto reserved = static_cast<std::uint32_t>(align_up(size, kAlignment));
  std::optional<std::uint32_t> addr;
  for (auto& arena : arenas_) {
    if ((addr = take_first_fit(arena.free, reserved))) break;
  }
  if (!addr) {
    allocate_system(layout_.arena_chunk_size, true);
    addr = take_first_fit(arenas_.back().free, reserved);
  }
  custom_bytes_ += size;
  freed_.erase(*addr);
  live_.emplace(*addr, AllocationRecord{Address{*addr}, size, AllocatorKind::Custom, true, false});
  emit(AllocEvent{AllocatorKind::Custom, Address{*addr}, size});
  return Address{*addr};
}

void MemoryModel::free(AllocatorKind allocator, Address addr) {
  auto it = live_.find(addr.value);
  if (it == live_.end()) {
    fault(freed_.count(addr.value) ? FaultKind::DoubleFree : FaultKind::InvalidFree, addr);
    return;
  }
  const AllocationRecord rec = it->second;
  if (rec.allocator != allocator) {
    fault(FaultKind::AllocatorMismatch, addr);
    return;
  }
  const auto reserved = static_cast<std::uint32_t>(align_up(rec.size, kAlignment));
  if (allocator == AllocatorKind::System) {
    give_back(sys_free_, addr.value, reserved);
    sys_bytes_ -= rec.size;
  } else {
    auto arena = std::find_if(arenas_.begin(), arenas_.end(), [&](const Arena& a) {
      return addr.value >= a.base.value && addr.value < a.base.value + std::uint64_t{a.size};
    });
    if (arena == arenas_.end()) throw std::logic_error("custom record outside every arena");
    // Returned to the arena only; chunk memory is never handed back to the system heap.
    give_back(arena->free, addr.value, reserved);
    custom_bytes_ -= rec.size;
  }
  live_.erase(it);
  freed_.insert(addr.value);
  emit(FreeEvent{allocator, addr, rec.size});
}

std::uint32_t MemoryModel::mapped_prefix(Address addr, std::uint32_t length) const {
  auto within = [&](const RegionSpec& r) -> std::optional<std::uint32_t> {
    const std::uint64_t end = std::uint64_t{r.base.value} + r.size;
    if (addr.value < r.base.value || addr.value >= end) return std::nullopt;
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(length, end - addr.value));
  };
  for (const auto& r : layout_.code) {
    if (auto n = within(r)) return *n;
  }
  for (const auto& r : layout_.stack) {
    if (auto n = within(r)) return *n;
  }
  if (auto n = within(layout_.heap)) return *n;
  return 0;
}

bool MemoryModel::is_mapped(Address addr) const { return mapped_prefix(addr, 1) == 1; }

void MemoryModel::write_bytes(Address addr, std::span<const std::uint8_t> data) {
  if (data.empty()) return;
  const auto length = static_cast<std::uint32_t>(data.size());
  const std::uint32_t mapped = mapped_prefix(addr, length);
  if (mapped < length) fault(FaultKind::AccessViolation, Address{addr.value + mapped});
  if (mapped == 0) return;
  if (auto rec = record_containing(addr); rec && std::uint64_t{addr.value} + length > rec->end()) {
    fault(FaultKind::Overflow, Address{static_cast<std::uint32_t>(rec->end())});
  }
  pages_.write(addr.value, data.first(mapped));
}

std::vector<std::uint8_t> MemoryModel::read_bytes(Address addr, std::uint32_t length) {
  std::vector<std::uint8_t> out(length, 0);
  if (length == 0) return out;
  const std::uint32_t mapped = mapped_prefix(addr, length);
  if (mapped < length) fault(FaultKind::AccessViolation, Address{addr.value + mapped});
  if (mapped > 0) pages_.read(addr.value, std::span(out).first(mapped));
  return out;
}

std::uint32_t MemoryModel::read_u32(Address addr) {
  auto bytes = read_bytes(addr, 4);
  return std::uint32_t{bytes[0]} | std::uint32_t{bytes[1]} << 8 | std::uint32_t{bytes[2]} << 16 |
         std::uint32_t{bytes[3]} << 24;
}

void MemoryModel::set_pc(Address addr) {
  pc_ = addr;
  emit(ExecTransferEvent{addr});
}

void MemoryModel::set_sp(Address addr) {
  sp_ = addr;
  emit(StackPivotEvent{addr});
}

AbstractState MemoryModel::derive_state() const {
  if (!baselines_captured()) throw StateError("derive_state before capture_baselines");
  AbstractState s;
  s.sys_heap_bytes = sys_bytes_;
  s.custom_heap_bytes = custom_bytes_;
  s.pc = pc_;
  s.sp = sp_;
  s.code_baseline = code_baseline_;
  s.stack_baseline = stack_baseline_;
  s.event_index = (bus_ && bus_->count() > 0) ? bus_->count() - 1 : 0;
  return s;
}

RegionSet MemoryModel::enumerate_regions() const {
  RegionSet out;
  for (const auto& r : layout_.code) out.push_back({r.base, r.size, RegionKind::Code, r.label});
  for (const auto& r : layout_.stack) out.push_back({r.base, r.size, RegionKind::Stack, r.label});

  auto chunks = arena_chunks();
  std::sort(chunks.begin(), chunks.end(),
            [](const MemoryRegion& a, const MemoryRegion& b) { return a.base < b.base; });
  std::uint64_t cursor = layout_.heap.base.value;
  const std::uint64_t heap_end = cursor + layout_.heap.size;
  for (const auto& c : chunks) {
    if (c.base.value > cursor) {
      out.push_back({Address{static_cast<std::uint32_t>(cursor)},
                     static_cast<std::uint32_t>(c.base.value - cursor), RegionKind::SystemHeap,
                     layout_.heap.label});
    }
    out.push_back(c);
    cursor = c.end();
  }
  if (cursor < heap_end) {
    out.push_back({Address{static_cast<std::uint32_t>(cursor)}, static_cast<std::uint32_t>(heap_end - cursor),
                   RegionKind::SystemHeap, layout_.heap.label});
  }
  std::sort(out.begin(), out.end(), [](const MemoryRegion& a, const MemoryRegion& b) { return a.base < b.base; });
  return out;
}

std::optional<AllocationRecord> MemoryModel::live_record(Address addr) const {
  auto it = live_.find(addr.value);
  if (it == live_.end()) return std::nullopt;
  return it->second;
}

std::optional<AllocationRecord> MemoryModel::record_containing(Address addr) const {
  auto it = live_.upper_bound(addr.value);
  if (it == live_.begin()) return std::nullopt;
  --it;
  if (addr.value < it->second.end()) return it->second;
  return std::nullopt;
}

std::vector<AllocationRecord> MemoryModel::live_records() const {
  std::vector<AllocationRecord> out;
  out.reserve(live_.size() + arenas_.size());
  for (const auto& a : arenas_) out.push_back({a.base, a.size, AllocatorKind::System, true, true});
  for (const auto& [addr, rec] : live_) out.push_back(rec);
  return out;
}

std::vector<MemoryRegion> MemoryModel::arena_chunks() const {
  std::vector<MemoryRegion> out;
  for (std::size_t i = 0; i < arenas_.size(); ++i) {
    out.push_back({arenas_[i].base, arenas_[i].size, RegionKind::CustomArena, "arena#" + std::to_string(i)});
  }
  return out;
}

}  // namespace wmr
