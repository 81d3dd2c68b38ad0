#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ast.hpp"

namespace wmr {

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

/// Thrown by parse(); carries every syntax error found (statement-level recovery).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<SyntaxError> errors);
  const std::vector<SyntaxError>& errors() const { return errors_; }

 private:
  std::vector<SyntaxError> errors_;
};

/// Parses a `.wms` script. No partial AST is returned on error.
///
/// setMarker(name) / resetMarker() are only accepted as whole statements and
/// become StmtKind::Marker nodes.
Script parse(std::string_view source);

}  // namespace wmr
