#include <doctest.h>

#include "parser.hpp"
#include "printer.hpp"
#include "../support/oracles.hpp"

using namespace wmr;

namespace {

void round_trip(const std::string& src) {
  Script a = parse(src);
  std::string printed = print(a);
  Script b = parse(printed);
  REQUIRE(a.body.size() == b.body.size());
  for (std::size_t i = 0; i < a.body.size(); ++i) CHECK(structurally_equal(*a.body[i], *b.body[i]));
  CHECK(print(b) == printed);
}

}  // namespace

TEST_CASE("statements and expressions round-trip through the printer") {
  round_trip("var a = 1, b = 'x';\n");
  round_trip("a = b + c * d - e / f % g;\n");
  round_trip("if (a < b && !c || d >= e) { x += 1; } else if (y) z--; else { }\n");
  round_trip("while (i != 10) { i++; if (i == 3) continue; if (i === 8) break; }\n");
  round_trip("for (var i = 0; i < 5; i++) { arr[i] = arr.length; }\nfor (;;) { break; }\n");
  round_trip("function f(a, b) { return a.x[b]; }\nvar o = {k: 1, 'q': [1, 2, 3]};\n");
  round_trip("var s = unescape('%u0c0d\\u0041\\n\\'');\nvar n = new Array(4);\nvar m = -0x1f;\n");
  round_trip("setMarker('A' + i);\nresetMarker();\n");
}

TEST_CASE("markers become marker statements") {
  Script s = parse("setMarker('A');\nfoo();\nresetMarker();\n");
  REQUIRE(s.body.size() == 3);
  CHECK(s.body[0]->kind == StmtKind::Marker);
  CHECK(s.body[0]->marker == MarkerKind::Set);
  CHECK(s.body[2]->kind == StmtKind::Marker);
  CHECK(s.body[2]->marker == MarkerKind::Reset);
  CHECK(s.body[0]->span.line == 1);
  CHECK(s.body[1]->span.line == 2);
}

TEST_CASE("syntax errors are collected with positions") {
  try {
    parse("var = 3;\nvar ok = 1;\nx = (1 + ;\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.errors().size() == 2);
    CHECK(e.errors()[0].span.line == 1);
    CHECK(e.errors()[1].span.line == 3);
  }
  CHECK_THROWS_AS(parse("setMarker();\n"), ParseError);
  CHECK_THROWS_AS(parse("x = setMarker('a');\n"), ParseError);
  CHECK_THROWS_AS(parse("'unterminated\n"), ParseError);
}

TEST_CASE("random generated scripts round-trip") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    testing::ScriptGenerator gen(seed);
    round_trip(gen.generate());
  }
}
