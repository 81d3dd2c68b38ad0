#include <doctest.h>

#include <map>
#include <random>

#include "errors.hpp"
#include "memory_model.hpp"
#include "../support/oracles.hpp"

using namespace wmr;

namespace {

struct Recorder : EventListener {
  std::vector<TraceEvent> events;
  void on_event(const TraceEvent& e) override { events.push_back(e); }
  std::size_t faults(FaultKind k) const {
    std::size_t n = 0;
    for (auto& e : events) {
      if (auto f = std::get_if<FaultEvent>(&e.payload); f && f->kind == k) ++n;
    }
    return n;
  }
};

AddressSpaceConfig small_layout() {
  auto c = AddressSpaceConfig::defaults();
  c.heap.size = 64u << 20;
  c.arena_chunk_size = 1u << 16;
  c.bypass_threshold = 1024;
  return c;
}

}  // namespace

TEST_CASE("default layout matches the documented windows") {
  auto c = AddressSpaceConfig::defaults();
  REQUIRE(c.code.size() == 1);
  CHECK(c.code[0].base.value == 0x00401000u);
  CHECK(c.stack[0].base.value == 0x00030000u);
  CHECK(c.heap.base.value == 0x00600000u);
  CHECK(c.heap.base.value + c.heap.size == 0x40000000u);
  CHECK_NOTHROW(validate(c));

  EventBus bus;
  MemoryModel m(c, &bus);
  m.capture_baselines();
  auto s = m.derive_state();
  CHECK(s.pc.value == 0x00401000u);
  CHECK(s.sp.value == 0x0012f000u);
}

TEST_CASE("invalid layouts are rejected") {
  auto c = AddressSpaceConfig::defaults();
  c.stack[0].base = Address{0x00401000};
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = AddressSpaceConfig::defaults();
  c.code.clear();
  CHECK_THROWS_AS(validate(c), ConfigError);

  c = AddressSpaceConfig::defaults();
  c.heap.base = Address{0xfff00000};
  c.heap.size = 0x00200000;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("aslr shifts windows deterministically") {
  auto c = AddressSpaceConfig::defaults();
  CHECK(apply_aslr(c) == c);
  c.aslr_seed = 42;
  auto a = apply_aslr(c);
  auto b = apply_aslr(c);
  CHECK(a == b);
  CHECK(a.code[0].base.value % 0x1000 == 0);
  CHECK_NOTHROW(validate(a));
}

TEST_CASE("allocations are aligned, disjoint and inside the heap") {
  EventBus bus;
  MemoryModel m(small_layout(), &bus);
  m.capture_baselines();
  auto a = m.allocate(AllocatorKind::System, 10);
  auto b = m.allocate(AllocatorKind::System, 10);
  CHECK(a.value % MemoryModel::kAlignment == 0);
  CHECK(b.value >= a.value + 16);
  CHECK(a.value >= 0x00600000u);
  CHECK(m.sys_heap_bytes() == 20);
}

TEST_CASE("custom allocations come from arena chunks that are never returned") {
  EventBus bus;
  Recorder rec;
  bus.add_listener(&rec);
  MemoryModel m(small_layout(), &bus);
  m.capture_baselines();
  auto r = m.allocate(AllocatorKind::Custom, 0x58);
  CHECK(m.sys_heap_bytes() == (1u << 16));
  CHECK(m.custom_heap_bytes() == 0x58);
  m.free(AllocatorKind::Custom, r);
  CHECK(m.sys_heap_bytes() == (1u << 16));
  CHECK(m.custom_heap_bytes() == 0);
  // Freed slot is reused first.
  CHECK(m.allocate(AllocatorKind::Custom, 0x50) == r);
  CHECK(m.arena_chunks().size() == 1);
}

TEST_CASE("custom requests at the bypass threshold go to the system heap") {
  EventBus bus;
  MemoryModel m(small_layout(), &bus);
  m.capture_baselines();
  auto big = m.allocate(AllocatorKind::Custom, 1024);
  CHECK(m.live_record(big)->allocator == AllocatorKind::System);
  CHECK(m.custom_heap_bytes() == 0);
  CHECK(m.sys_heap_bytes() == 1024);
  CHECK(m.arena_chunks().empty());
}

TEST_CASE("memory errors become fault events") {
  EventBus bus;
  Recorder rec;
  bus.add_listener(&rec);
  MemoryModel m(small_layout(), &bus);
  m.capture_baselines();
  auto a = m.allocate(AllocatorKind::System, 32);
  m.free(AllocatorKind::System, a);
  m.free(AllocatorKind::System, a);
  CHECK(rec.faults(FaultKind::DoubleFree) == 1);

  m.free(AllocatorKind::System, Address{0x00612340});
  CHECK(rec.faults(FaultKind::InvalidFree) == 1);

  auto c = m.allocate(AllocatorKind::Custom, 16);
  m.free(AllocatorKind::System, c);
  CHECK(rec.faults(FaultKind::AllocatorMismatch) == 1);

  std::vector<std::uint8_t> bytes(40, 0x41);
  auto d = m.allocate(AllocatorKind::System, 32);
  m.write_bytes(d, bytes);
  CHECK(rec.faults(FaultKind::Overflow) == 1);

  CHECK(m.read_u32(Address{0x00000010}) == 0);
  CHECK(rec.faults(FaultKind::AccessViolation) == 1);
}

TEST_CASE("heap exhaustion throws") {
  auto c = small_layout();
  c.heap.size = 1u << 20;
  EventBus bus;
  MemoryModel m(c, &bus);
  m.capture_baselines();
  m.allocate(AllocatorKind::System, 600u << 10);
  CHECK_THROWS_AS(m.allocate(AllocatorKind::System, 600u << 10), OutOfMemory);
}

TEST_CASE("baselines must precede allocation and are frozen") {
  EventBus bus;
  MemoryModel m(small_layout(), &bus);
  CHECK_THROWS_AS(m.derive_state(), StateError);
  auto b = m.capture_baselines();
  CHECK_THROWS_AS(m.capture_baselines(), StateError);
  m.allocate(AllocatorKind::Custom, 16);
  CHECK(m.derive_state().code_baseline->size() == b.code.size());
}

TEST_CASE("bytes written read back, including across pages") {
  EventBus bus;
  MemoryModel m(small_layout(), &bus);
  m.capture_baselines();
  auto a = m.allocate(AllocatorKind::System, 10000);
  std::vector<std::uint8_t> data(10000);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i * 7);
  m.write_bytes(a, data);
  CHECK(m.read_bytes(a, 10000) == data);
  CHECK(m.read_u32(Address{a.value + 4}) ==
        (std::uint32_t{data[4]} | std::uint32_t{data[5]} << 8 | std::uint32_t{data[6]} << 16 |
         std::uint32_t{data[7]} << 24));
}

TEST_CASE("uniform pages are shared") {
  PageStore store;
  std::vector<std::uint8_t> fill(PageStore::kPageSize * 8);
  for (std::size_t i = 0; i < fill.size(); i += 4) {
    fill[i] = 0x0d;
    fill[i + 1] = 0x0c;
    fill[i + 2] = 0x0d;
    fill[i + 3] = 0x0c;
  }
  store.write(0x00600000, fill);
  CHECK(store.resident_pages() <= 2);
  std::vector<std::uint8_t> back(fill.size());
  store.read(0x00600000, back);
  CHECK(back == fill);
  std::uint8_t one = 0x99;
  store.write(0x00601000, std::span(&one, 1));
  store.read(0x00600000, back);
  CHECK(back[0x1000] == 0x99);
  CHECK(back[0x2000] == 0x0d);
}

TEST_CASE("random allocate/free sequences agree with a brute-force ledger") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    EventBus bus;
    Recorder rec;
    bus.add_listener(&rec);
    MemoryModel m(small_layout(), &bus);
    m.capture_baselines();

    std::map<std::uint32_t, std::pair<std::uint32_t, AllocatorKind>> live;
    testing::Ledger ledger;
    ledger.state = m.derive_state();
    for (int step = 0; step < 400; ++step) {
      bool do_free = !live.empty() && rng() % 3 == 0;
      if (do_free) {
        auto it = live.begin();
        std::advance(it, rng() % live.size());
        m.free(it->second.second, Address{it->first});
        live.erase(it);
      } else {
        auto kind = rng() % 2 ? AllocatorKind::System : AllocatorKind::Custom;
        std::uint32_t size = 1 + rng() % (rng() % 4 == 0 ? 4000 : 200);
        auto a = m.allocate(kind, size);
        auto actual = m.live_record(a)->allocator;
        // No overlap with anything live.
        for (auto& [addr, v] : live) {
          bool disjoint = a.value + size <= addr || addr + v.first <= a.value;
          REQUIRE(disjoint);
        }
        live[a.value] = {size, actual};
      }
    }
    for (auto& e : rec.events) ledger.apply(e);
    CHECK(testing::counter(ledger.state, false) == m.sys_heap_bytes());
    CHECK(ledger.state.custom_heap_bytes == m.custom_heap_bytes());
    std::size_t records = 0;
    for (auto& r : m.live_records()) records += !r.arena_chunk;
    CHECK(records == live.size());
    CHECK(rec.faults(FaultKind::DoubleFree) == 0);
    // Indices are gap-free.
    for (std::size_t i = 0; i < rec.events.size(); ++i) REQUIRE(rec.events[i].index == i);
  }
}
