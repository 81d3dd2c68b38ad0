#include "layout.hpp"

#include <random>

#include "errors.hpp"

namespace wmr {

AddressSpaceConfig AddressSpaceConfig::defaults() {
  AddressSpaceConfig c;
  c.code.push_back({Address{0x00401000}, 0x00100000, "image"});
  c.stack.push_back({Address{0x00030000}, 0x00100000, "stack"});
  c.heap = {Address{0x00600000}, 0x3fa00000, "heap"};
  return c;
}

namespace {

MemoryRegion as_region(const RegionSpec& spec, RegionKind kind) {
  return {spec.base, spec.size, kind, spec.label};
}

void check_window(const RegionSpec& spec, std::string_view what) {
  if (spec.size == 0) {
    throw ConfigError(std::string(what) + " window '" + spec.label + "' has zero size");
  }
  if (spec.base.value == 0) {
    throw ConfigError(std::string(what) + " window '" + spec.label + "' starts at address 0");
  }
  if (std::uint64_t{spec.base.value} + spec.size > (std::uint64_t{1} << 32)) {
    throw ConfigError(std::string(what) + " window '" + spec.label + "' wraps the address space");
  }
}

}  // namespace

void validate(const AddressSpaceConfig& config) {
  if (config.code.empty()) throw ConfigError("layout has no code window");
  if (config.stack.empty()) throw ConfigError("layout has no stack window");

  std::vector<MemoryRegion> all;
  for (const auto& r : config.code) {
    check_window(r, "code");
    all.push_back(as_region(r, RegionKind::Code));
  }
  for (const auto& r : config.stack) {
    check_window(r, "stack");
    if (r.size <= kInitialStackHeadroom) {
      throw ConfigError("stack window '" + r.label + "' is too small");
    }
    all.push_back(as_region(r, RegionKind::Stack));
  }
  check_window(config.heap, "heap");
  all.push_back(as_region(config.heap, RegionKind::SystemHeap));

  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].overlaps(all[j])) {
        throw ConfigError("windows '" + all[i].label + "' and '" + all[j].label + "' overlap");
      }
    }
  }

  if (config.arena_chunk_size == 0 || config.bypass_threshold == 0) {
    throw ConfigError("allocator sizes must be positive");
  }
  if (config.bypass_threshold > config.arena_chunk_size) {
    throw ConfigError("bypass_threshold must not exceed arena_chunk_size");
  }
  if (config.arena_chunk_size > config.heap.size) {
    throw ConfigError("arena_chunk_size exceeds the heap window");
  }
}

AddressSpaceConfig apply_aslr(const AddressSpaceConfig& config) {
  if (!config.aslr_seed) return config;
  std::mt19937_64 rng(*config.aslr_seed);
  std::uniform_int_distribution<std::uint32_t> slide(0, 63);
  auto shift = [&](RegionSpec& r) {
    std::uint64_t moved = std::uint64_t{r.base.value} + std::uint64_t{slide(rng)} * 0x10000;
    if (moved + r.size > (std::uint64_t{1} << 32)) {
      throw ConfigError("ASLR slide pushes window '" + r.label + "' past the address space");
    }
    r.base = Address{static_cast<std::uint32_t>(moved)};
  };
  AddressSpaceConfig out = config;
  for (auto& r : out.code) shift(r);
  for (auto& r : out.stack) shift(r);
  shift(out.heap);
  validate(out);
  return out;
}

}  // namespace wmr
