#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "report.hpp"

namespace wmr {

class AnnotateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_annotation_line(std::string_view line);

// Removes previously inserted annotation lines; everything else is kept byte for byte.
std::string strip_annotations(std::string_view source);

// Hash of the stripped source; what reports record.
std::string script_hash(std::string_view source);

// After each marker line: `//name::l*` and `//[Info:...]` (bare `//name::` for
// epsilon). Synthetic candidates are annotated above their statement.
// Throws AnnotateError when the report belongs to a different source.
std::string annotate(std::string_view source, const WMReport& report, bool compress = false);

}  // namespace wmr
