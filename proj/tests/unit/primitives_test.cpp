#include <doctest.h>

#include "../support/oracles.hpp"

using namespace wmr;

namespace {

std::shared_ptr<const RegionSet> code_set() {
  return std::make_shared<RegionSet>(RegionSet{{Address{0x00401000}, 0x100000, RegionKind::Code, "image"},
                                               {Address{0x10000000}, 0x2000, RegionKind::Code, "jit"}});
}
std::shared_ptr<const RegionSet> stack_set() {
  return std::make_shared<RegionSet>(RegionSet{{Address{0x00030000}, 0x100000, RegionKind::Stack, "stack"}});
}

AbstractState state(std::uint64_t sys, std::uint64_t custom, std::uint32_t pc, std::uint32_t sp,
                    std::uint64_t index) {
  AbstractState s;
  s.sys_heap_bytes = sys;
  s.custom_heap_bytes = custom;
  s.pc = Address{pc};
  s.sp = Address{sp};
  s.code_baseline = code_set();
  s.stack_baseline = stack_set();
  s.event_index = index;
  return s;
}

std::vector<std::string> detect_all(const AbstractState& a, const AbstractState& b, bool aware) {
  auto reg = DetectorRegistry::standard();
  return testing::label_names(transitions_identify(reg, {a, b}, DetectOptions{aware}));
}

}  // namespace

TEST_CASE("size formatting") {
  CHECK(format_size(0) == "0B");
  CHECK(format_size(88) == "88B");
  CHECK(format_size(1023) == "1023B");
  CHECK(format_size(1024) == "1KB");
  CHECK(format_size(523264) == "511KB");
  CHECK(format_size((1u << 20) - 1) == "1023KB");
  CHECK(format_size(1u << 20) == "1MB");
  CHECK(format_size(3u << 19) == "1.5MB");
  CHECK(format_size((1u << 20) + 104857) == "1MB");
  CHECK(format_size((1u << 20) + 104858) == "1.1MB");
}

TEST_CASE("detector examples") {
  const std::uint32_t pc = 0x00401000, sp = 0x0012f000;
  CHECK(detect_all(state(0, 0, pc, sp, 0), state(1u << 20, 0, pc, sp, 1), false) ==
        std::vector<std::string>{"memalloc"});
  CHECK(transitions_identify(DetectorRegistry::standard(), {state(0, 0, pc, sp, 0), state(1u << 20, 0, pc, sp, 1)},
                             {})[0]
            .info == "1MB");
  CHECK(detect_all(state(100, 0, pc, sp, 0), state(100, 0, pc, sp, 1), false).empty());
  CHECK(detect_all(state(0, 0, pc, sp, 0), state(0, 0x58, pc, sp, 1), false).empty());
  CHECK(detect_all(state(0, 0, pc, sp, 0), state(0, 0x58, pc, sp, 1), true) == std::vector<std::string>{"memalloc"});
  CHECK(detect_all(state(523264, 0, pc, sp, 0), state(0, 0, pc, sp, 1), false) ==
        std::vector<std::string>{"memfree"});

  auto exec = transitions_identify(DetectorRegistry::standard(),
                                   {state(0, 0, pc, sp, 0), state(0, 0, 0x0c0d0c0d, sp, 1)}, {});
  REQUIRE(exec.size() == 1);
  CHECK(exec[0] == Primitive{"execCrafted", "0x0c0d0c0d"});
  CHECK(detect_all(state(0, 0, pc, sp, 0), state(0, 0, 0x10000010, sp, 1), false).empty());
  CHECK(detect_all(state(0, 0, 0x0c0d0c0d, sp, 0), state(0, 0, 0x0c0d0c0d, sp, 1), false).empty());

  auto pivot = transitions_identify(DetectorRegistry::standard(),
                                    {state(0, 0, pc, sp, 0), state(0, 0, pc, 0x046ae04c, 1)}, {});
  REQUIRE(pivot.size() == 1);
  CHECK(pivot[0] == Primitive{"callStackReplace", "0x046ae04c"});
  CHECK(detect_all(state(0, 0, pc, sp, 0), state(0, 0, pc, 0x00040000, 1), false).empty());
}

TEST_CASE("all matches of one pair are appended in registry order") {
  auto labels = detect_all(state(0, 0, 0x00401000, 0x0012f000, 0), state(64, 0, 0x0c0d0c0d, 0x0c0d0000, 1), false);
  CHECK(labels == std::vector<std::string>{"execCrafted", "callStackReplace", "memalloc"});
}

TEST_CASE("constant snapshots give epsilon") {
  auto s = state(10, 10, 0x00401000, 0x0012f000, 0);
  std::vector<AbstractState> snaps(5, s);
  CHECK(transitions_identify(DetectorRegistry::standard(), snaps, {}).empty());
  CHECK(transitions_identify(DetectorRegistry::standard(), {s}, {}).empty());
}

TEST_CASE("randomized pairs agree with the brute-force oracle") {
  for (bool aware : {false, true}) {
    testing::StatePairGenerator gen(aware ? 7 : 3, code_set(), stack_set());
    auto reg = DetectorRegistry::standard();
    for (int i = 0; i < 2000; ++i) {
      auto [w, w2] = gen.next();
      auto got = testing::label_names(transitions_identify(reg, {w, w2}, DetectOptions{aware}));
      auto want = testing::oracle_labels(w, w2, aware);
      REQUIRE(got == want);
      bool both = std::count(got.begin(), got.end(), "memalloc") && std::count(got.begin(), got.end(), "memfree");
      REQUIRE_FALSE(both);
    }
  }
}

TEST_CASE("registry rejects duplicate labels") {
  auto reg = DetectorRegistry::standard();
  CHECK(reg.detectors().size() == 4);
  CHECK(reg.detectors()[0]->label() == "execCrafted");
  CHECK(reg.detectors()[3]->label() == "memalloc");
  CHECK_THROWS_AS(reg.add(make_memalloc_detector()), std::invalid_argument);
}

TEST_CASE("label rendering") {
  std::vector<Primitive> ls = {{"memalloc", "511KB"}, {"memalloc", "511KB"}, {"memfree", "511KB"},
                               {"execCrafted", "0x0c0d0c0d"}};
  CHECK(render_labels(ls) == "memalloc+memalloc+memfree+execCrafted");
  CHECK(render_infos(ls) == "511KB+511KB+511KB+0x0c0d0c0d");
  CHECK(render_compressed(ls) == "memalloc\xc3\x97" "2[511KB]+memfree[511KB]+execCrafted[0x0c0d0c0d]");
  CHECK(render_labels({}).empty());
}
