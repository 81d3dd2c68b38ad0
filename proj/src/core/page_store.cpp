#include "page_store.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_set>

namespace wmr {

namespace {

std::uint32_t load_word(const std::uint8_t* p) {
  std::uint32_t w;
  std::memcpy(&w, p, 4);
  return w;
}

// True when every aligned 4-byte word equals the first one.
bool uniform_word(const std::uint8_t* data, std::uint32_t size, std::uint32_t& word) {
  word = load_word(data);
  for (std::uint32_t off = 4; off < size; off += 4) {
    if (load_word(data + off) != word) return false;
  }
  return true;
}

}  // namespace

PageStore::PagePtr PageStore::intern_uniform(std::uint32_t word) {
  auto& slot = uniform_[word];
  if (!slot) {
    slot = std::make_shared<Page>();
    for (std::uint32_t off = 0; off < kPageSize; off += 4) std::memcpy(slot->data() + off, &word, 4);
  }
  return slot;
}

void PageStore::store_page(std::uint32_t page_no, PagePtr page) {
  if (!page) {
    pages_.erase(page_no);
  } else {
    pages_[page_no] = std::move(page);
  }
}

void PageStore::write(std::uint32_t addr, std::span<const std::uint8_t> data) {
  std::uint64_t cursor = addr;
  const std::uint64_t end = std::uint64_t{addr} + data.size();
  std::size_t consumed = 0;
  while (cursor < end) {
    const auto page_no = static_cast<std::uint32_t>(cursor >> kPageBits);
    const auto offset = static_cast<std::uint32_t>(cursor & (kPageSize - 1));
    const auto chunk = static_cast<std::uint32_t>(std::min<std::uint64_t>(kPageSize - offset, end - cursor));
    const std::uint8_t* src = data.data() + consumed;

    std::uint32_t word = 0;
    if (chunk == kPageSize && uniform_word(src, kPageSize, word)) {
      store_page(page_no, word == 0 ? nullptr : intern_uniform(word));
    } else {
      auto it = pages_.find(page_no);
      PagePtr page;
      if (it == pages_.end()) {
        page = std::make_shared<Page>();
        page->fill(0);
      } else if (it->second.use_count() > 1) {
        page = std::make_shared<Page>(*it->second);
      } else {
        page = it->second;
      }
      std::memcpy(page->data() + offset, src, chunk);
      store_page(page_no, std::move(page));
    }
    cursor += chunk;
    consumed += chunk;
  }
}

void PageStore::read(std::uint32_t addr, std::span<std::uint8_t> out) const {
  std::uint64_t cursor = addr;
  const std::uint64_t end = std::uint64_t{addr} + out.size();
  std::size_t produced = 0;
  while (cursor < end) {
    const auto page_no = static_cast<std::uint32_t>(cursor >> kPageBits);
    const auto offset = static_cast<std::uint32_t>(cursor & (kPageSize - 1));
    const auto chunk = static_cast<std::uint32_t>(std::min<std::uint64_t>(kPageSize - offset, end - cursor));
    auto it = pages_.find(page_no);
    if (it == pages_.end()) {
      std::memset(out.data() + produced, 0, chunk);
    } else {
      std::memcpy(out.data() + produced, it->second->data() + offset, chunk);
    }
    cursor += chunk;
    produced += chunk;
  }
}

std::size_t PageStore::resident_pages() const {
  std::unordered_set<const Page*> distinct;
  for (const auto& [no, page] : pages_) distinct.insert(page.get());
  return distinct.size();
}

}  // namespace wmr
