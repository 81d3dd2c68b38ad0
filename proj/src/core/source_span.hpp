#pragma once

#include <cstdint>
#include <string>

namespace wmr {

// 1-based line/column; length in bytes of source text.
struct SourceSpan {
  std::uint32_t line = 0;
  std::uint32_t column = 0;
  std::uint32_t length = 0;

  bool operator==(const SourceSpan&) const = default;
};

inline std::string to_string(const SourceSpan& s) {
  return std::to_string(s.line) + ":" + std::to_string(s.column);
}

}  // namespace wmr
