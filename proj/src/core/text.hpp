#pragma once

#include <string>
#include <string_view>

namespace wmr {

std::string to_utf8(std::u16string_view text);
std::u16string ascii_to_u16(std::string_view text);

// Script-style number rendering: integers without a fraction, NaN, Infinity.
std::string format_number(double v);

}  // namespace wmr

namespace wmr {

// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

}  // namespace wmr
