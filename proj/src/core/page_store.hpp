#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>

namespace wmr {

/// Sparse byte storage for the 32-bit address space.
///
/// Pages whose content is a single repeated 32-bit word are interned, so a
/// heap spray of hundreds of megabytes of one fill pattern costs one page.
/// Pages are copy-on-write. Untouched pages read as zero.
class PageStore {
 public:
  static constexpr std::uint32_t kPageBits = 12;
  static constexpr std::uint32_t kPageSize = 1u << kPageBits;

  void write(std::uint32_t addr, std::span<const std::uint8_t> data);
  void read(std::uint32_t addr, std::span<std::uint8_t> out) const;

  // Distinct page buffers currently referenced, interned ones counted once.
  std::size_t resident_pages() const;

 private:
  using Page = std::array<std::uint8_t, kPageSize>;
  using PagePtr = std::shared_ptr<Page>;

  PagePtr intern_uniform(std::uint32_t word);
  void store_page(std::uint32_t page_no, PagePtr page);

  std::unordered_map<std::uint32_t, PagePtr> pages_;
  std::unordered_map<std::uint32_t, PagePtr> uniform_;
};

}  // namespace wmr
