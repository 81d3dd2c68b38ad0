#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "config.hpp"
#include "errors.hpp"

using namespace wmr;

TEST_CASE("keys round-trip through set and get") {
  RunConfig c;
  c.set("heap_base", "0x00800000");
  c.set("heap_size", "0x10000000");
  c.set("arena_chunk_size", "65536");
  c.set("bypass_threshold", "0x400");
  c.set("aware_custom_alloc", "on");
  c.set("auto_candidates", "2");
  c.set("compress_labels", "true");
  c.set("timeout_events", "1000000");
  c.set("jit_base", "0x20000000");
  c.set("jit_size", "0x1000");
  CHECK(c.get("heap_base") == "0x00800000");
  CHECK(c.get("heap_size") == std::to_string(0x10000000));
  CHECK(c.get("bypass_threshold") == "1024");
  CHECK(c.get("aware_custom_alloc") == "true");
  CHECK(c.get("auto_candidates") == "2");
  CHECK(c.get("timeout_events") == "1000000");
  CHECK(c.layout.code.size() == 2);
  CHECK_NOTHROW(c.validate());
  c.set("auto_candidates", "false");
  CHECK_FALSE(c.auto_candidates.has_value());
  c.set("auto_candidates", "true");
  CHECK(c.auto_candidates == 0);
}

TEST_CASE("bad keys and values are rejected") {
  RunConfig c;
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("heap_size", "lots"), ConfigError);
  CHECK_THROWS_AS(c.set("aware_custom_alloc", "maybe"), ConfigError);
  CHECK_THROWS_AS(c.set("auto_candidates", "-1"), ConfigError);
  CHECK_THROWS_AS(c.get("no_such_key"), ConfigError);
  c.set("timeout_events", "0");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  RunConfig d;
  d.set("arena_chunk_size", "0");
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("echo round-trips") {
  RunConfig c;
  c.set("aware_custom_alloc", "true");
  c.set("stack_base", "0x00100000");
  c.set("aslr_seed", "9");
  auto back = RunConfig::from_echo(c.echo());
  CHECK(back.echo() == c.echo());
  CHECK(back.aware_custom_alloc);
  CHECK(back.layout == c.layout);
  CHECK(c.echo().begin().key() == "layout");
}

TEST_CASE("config files are flat json and every key is settable") {
  const char* path = "config_test_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"aware_custom_alloc": true, "timeout_events": 42, "heap_base": "0x00700000", "aslr_seed": null})";
  }
  RunConfig c;
  c.load_file(path);
  CHECK(c.aware_custom_alloc);
  CHECK(c.timeout_events == 42);
  CHECK(c.layout.heap.base.value == 0x00700000u);
  std::remove(path);
  CHECK_THROWS_AS(c.load_file("does/not/exist.json"), ConfigError);
  for (const auto& k : RunConfig::keys()) CHECK_NOTHROW(c.get(k));
}
