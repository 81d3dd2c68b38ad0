#include "address.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace wmr {

std::string format_address(Address a) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "0x%08x", a.value);
  return buf;
}

std::uint64_t parse_integer(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Code: return "Code";
    case RegionKind::Stack: return "Stack";
    case RegionKind::SystemHeap: return "SystemHeap";
    case RegionKind::CustomArena: return "CustomArena";
  }
  return "?";
}

RegionKind region_kind_from_string(std::string_view text) {
  if (text == "Code") return RegionKind::Code;
  if (text == "Stack") return RegionKind::Stack;
  if (text == "SystemHeap") return RegionKind::SystemHeap;
  if (text == "CustomArena") return RegionKind::CustomArena;
  throw std::invalid_argument("unknown region kind '" + std::string(text) + "'");
}

bool region_set_contains(const RegionSet& regions, Address a) {
  return std::any_of(regions.begin(), regions.end(),
                     [a](const MemoryRegion& r) { return r.contains(a); });
}

}  // namespace wmr
