#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "source_span.hpp"

namespace wmr {

enum class ExprKind {
  Number,
  String,
  Bool,
  Null,
  Identifier,
  ArrayLiteral,
  ObjectLiteral,
  Unary,     // op in `op`, operand children[0]
  Binary,    // arithmetic / comparison; children[0] op children[1]
  Logical,   // && ||
  Assign,    // = += -= ; target children[0], value children[1]
  Update,    // ++ -- ; prefix flag
  Call,      // callee children[0], args children[1..]
  Member,    // object children[0], property name in `name`
  Index,     // object children[0], index children[1]
  New,       // constructor name in `name`, args children
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::Null;
  SourceSpan span;
  double number = 0;
  bool boolean = false;
  bool prefix = false;
  std::u16string text;            // String literal value
  std::string name;               // Identifier / Member property / New constructor
  std::string op;                 // Unary / Binary / Logical / Assign / Update
  std::vector<std::string> keys;  // ObjectLiteral keys, parallel to children
  std::vector<ExprPtr> children;

  ExprPtr clone() const;
};

enum class StmtKind { Var, Expression, Block, While, For, If, Function, Return, Break, Continue, Empty, Marker };

enum class MarkerKind { Set, Reset };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct VarDecl {
  std::string name;
  ExprPtr init;  // may be null
};

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  SourceSpan span;

  std::vector<VarDecl> decls;  // Var
  ExprPtr expr;                // Expression value, While/For/If condition, Return value, Marker name
  ExprPtr update;              // For
  StmtPtr init;                // For (Var or Expression statement), may be null
  StmtPtr body;                // While / For / If-then
  StmtPtr alt;                 // If-else, may be null
  std::vector<StmtPtr> block;  // Block / Function body

  std::string name;                 // Function name
  std::vector<std::string> params;  // Function
  std::vector<std::string> locals;  // Function: params + hoisted `var` names

  MarkerKind marker = MarkerKind::Set;
  // Marker inserted by candidate auto-selection; `name` carries the label.
  bool synthetic = false;

  StmtPtr clone() const;
};

bool is_compound(StmtKind kind);

struct Script {
  std::string source;
  std::vector<StmtPtr> body;

  Script() = default;
  Script(Script&&) = default;
  Script& operator=(Script&&) = default;
  Script clone() const;
};

/// Structural equality: ignores spans, compares everything else.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const Script& a, const Script& b);

}  // namespace wmr
