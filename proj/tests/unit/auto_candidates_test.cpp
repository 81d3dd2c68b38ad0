#include <doctest.h>

#include "auto_candidates.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "session.hpp"

using namespace wmr;

namespace {

std::vector<std::string> names(const WMReport& r) {
  std::vector<std::string> out;
  for (auto& e : r.entries) out.push_back(e.name);
  return out;
}

RunConfig auto_at(int depth) {
  RunConfig c;
  c.auto_candidates = depth;
  return c;
}

}  // namespace

TEST_CASE("three top-level statements give three synthetic candidates") {
  auto r = analyze_source("var a = 1;\nvar b = 2;\nvar c = 3;\n", "x.wms", auto_at(0));
  CHECK(names(r) == std::vector<std::string>{"stmt@1:1", "stmt@2:1", "stmt@3:1"});
  for (auto& e : r.entries) CHECK(e.synthetic);
}

TEST_CASE("a loop at depth one is one compound candidate") {
  const char* src = "function f() {\n  for (var i = 0; i < 3; i++) { var s = unescape('%u4141'); }\n}\nf();\n";
  auto r = analyze_source(src, "x.wms", auto_at(1));
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].name == "stmt@4:1");
  CHECK(r.entries[1].name == "stmt@2:3");
  CHECK(r.entries[1].kind == CandidateKind::Compound);
  CHECK(render_labels(r.entries[1].labels) == "memalloc+memalloc+memfree+memalloc+memfree");
}

TEST_CASE("hand markers are replaced and function declarations are not wrapped") {
  Script s = auto_candidates(parse("setMarker('X');\nfunction f() { return 1; }\nf();\n"), 0);
  auto text = print(s);
  CHECK(text.find("'X'") == std::string::npos);
  CHECK(text.find("stmt@3:1") != std::string::npos);
  CHECK(text.find("stmt@2:1") == std::string::npos);
}

TEST_CASE("unbraced bodies needing wrappers become blocks") {
  const char* src = "var n = 0;\nwhile (n < 2)\n  n++;\n";
  auto r = analyze_source(src, "x.wms", auto_at(1));
  REQUIRE(r.entries.size() == 4);
  CHECK(r.entries[2].name == "stmt@3:3");
  CHECK(r.entries[3].name == "stmt@3:3#1");
}

TEST_CASE("auto mode reproduces hand-marker labels at the same spans") {
  const char* hand =
      "var keep = new Array();\n"
      "setMarker('L');\nfor (var i = 0; i < 4; i++) { keep.push(unescape('%u4141%u4242')); }\nresetMarker();\n"
      "setMarker('P');\nkeep.pop();\nresetMarker();\n";
  const char* bare =
      "var keep = new Array();\n"
      "for (var i = 0; i < 4; i++) { keep.push(unescape('%u4141%u4242')); }\n"
      "keep.pop();\n";
  auto h = analyze_source(hand, "h.wms", RunConfig{});
  auto a = analyze_source(bare, "b.wms", auto_at(0));
  REQUIRE(h.entries.size() == 2);
  REQUIRE(a.entries.size() == 3);
  CHECK(render_labels(a.entries[1].labels) == render_labels(h.entries[0].labels));
  CHECK(render_infos(a.entries[1].labels) == render_infos(h.entries[0].labels));
  CHECK(render_labels(a.entries[2].labels) == render_labels(h.entries[1].labels));
}
