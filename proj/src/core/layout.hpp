#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "address.hpp"

namespace wmr {

struct RegionSpec {
  Address base;
  std::uint32_t size = 0;
  std::string label;

  bool operator==(const RegionSpec&) const = default;
};

/// Address-space layout plus allocator parameters of the simulated target.
///
/// Default layout (ASLR off):
///   image  0x00401000 + 1 MiB   (Code; entry point at its base)
///   stack  0x00030000 + 1 MiB   (Stack; initial sp 0x0012f000)
///   heap   0x00600000 .. 0x40000000 (SystemHeap)
struct AddressSpaceConfig {
  std::vector<RegionSpec> code;
  std::vector<RegionSpec> stack;
  RegionSpec heap;

  std::uint32_t arena_chunk_size = 1u << 20;
  std::uint32_t bypass_threshold = 16u << 10;

  std::optional<std::uint64_t> aslr_seed;

  static AddressSpaceConfig defaults();

  bool operator==(const AddressSpaceConfig&) const = default;
};

// Distance of the initial stack pointer below the top of the first stack window.
inline constexpr std::uint32_t kInitialStackHeadroom = 0x1000;

/// Throws ConfigError on overlapping/wrapping windows, missing code or stack
/// windows, or inconsistent allocator parameters.
void validate(const AddressSpaceConfig& config);

/// Returns a copy with region bases shifted by a seeded, page-granular offset.
/// Identity when no seed is configured.
AddressSpaceConfig apply_aslr(const AddressSpaceConfig& config);

}  // namespace wmr
