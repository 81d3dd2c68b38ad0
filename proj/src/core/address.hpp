#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wmr {

/// A 32-bit virtual address in the simulated target process.
struct Address {
  std::uint32_t value = 0;

  constexpr Address() = default;
  constexpr explicit Address(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const Address&) const = default;
};

/// Renders an address as 0x-prefixed, 8-digit lowercase hex (e.g. 0x0c0d0c0d).
std::string format_address(Address a);

/// Parses "0x..." hex or plain decimal. Throws std::invalid_argument.
std::uint64_t parse_integer(std::string_view text);

enum class RegionKind { Code, Stack, SystemHeap, CustomArena };

std::string_view to_string(RegionKind kind);
RegionKind region_kind_from_string(std::string_view text);

struct MemoryRegion {
  Address base;
  std::uint32_t size = 0;
  RegionKind kind = RegionKind::Code;
  std::string label;

  // One past the last byte, widened so that regions ending at 2^32 are representable.
  std::uint64_t end() const { return std::uint64_t{base.value} + size; }

  bool contains(Address a) const { return a.value >= base.value && a.value < end(); }

  bool overlaps(const MemoryRegion& other) const {
    return base.value < other.end() && other.base.value < end();
  }

  bool operator==(const MemoryRegion&) const = default;
};

using RegionSet = std::vector<MemoryRegion>;

bool region_set_contains(const RegionSet& regions, Address a);

}  // namespace wmr
