#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wmr::tools {

struct DiffOp {
  enum Kind { Equal, Insert, Delete } kind;
  std::size_t a = 0;  // index into a (Equal, Delete)
  std::size_t b = 0;  // index into b (Equal, Insert)
};

std::vector<std::string> split_lines(std::string_view text);

// Shortest edit script (Myers).
std::vector<DiffOp> myers_diff(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Empty when the texts are identical.
std::string unified_diff(std::string_view a, std::string_view b, std::string_view a_name, std::string_view b_name,
                         std::size_t context = 3);

}  // namespace wmr::tools
