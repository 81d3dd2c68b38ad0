#pragma once

#include <string>

#include "ast.hpp"

namespace wmr {

/// Canonical source rendering. Binary operators are fully parenthesized so the
/// output re-parses to a structurally identical tree.
std::string print(const Script& script);
std::string print(const Stmt& stmt, int indent = 0);
std::string print(const Expr& expr);

std::string quote_string(const std::u16string& text);

}  // namespace wmr
