#pragma once

#include <string>

#include "ast.hpp"

namespace wmr {

std::string synthetic_name(const SourceSpan& span);

/// Replaces hand markers with synthetic ones around every statement whose
/// nesting depth is at most `depth` (top level is 0, function bodies count as 1).
/// Function declarations themselves are never wrapped.
Script auto_candidates(const Script& script, int depth);

}  // namespace wmr
