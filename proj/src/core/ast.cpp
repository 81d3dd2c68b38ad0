#include "ast.hpp"

namespace wmr {

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->span = span;
  e->number = number;
  e->boolean = boolean;
  e->prefix = prefix;
  e->text = text;
  e->name = name;
  e->op = op;
  e->keys = keys;
  for (const auto& c : children) e->children.push_back(c->clone());
  return e;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->span = span;
  for (const auto& d : decls) s->decls.push_back({d.name, d.init ? d.init->clone() : nullptr});
  if (expr) s->expr = expr->clone();
  if (update) s->update = update->clone();
  if (init) s->init = init->clone();
  if (body) s->body = body->clone();
  if (alt) s->alt = alt->clone();
  for (const auto& b : block) s->block.push_back(b->clone());
  s->name = name;
  s->params = params;
  s->locals = locals;
  s->marker = marker;
  s->synthetic = synthetic;
  return s;
}

bool is_compound(StmtKind kind) {
  switch (kind) {
    case StmtKind::Block:
    case StmtKind::While:
    case StmtKind::For:
    case StmtKind::If:
    case StmtKind::Function:
      return true;
    default:
      return false;
  }
}

Script Script::clone() const {
  Script s;
  s.source = source;
  for (const auto& st : body) s.body.push_back(st->clone());
  return s;
}

namespace {

template <typename T>
bool both_null_or_equal(const std::unique_ptr<T>& a, const std::unique_ptr<T>& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

template <typename T>
bool lists_equal(const std::vector<std::unique_ptr<T>>& a, const std::vector<std::unique_ptr<T>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.number == b.number && a.boolean == b.boolean && a.prefix == b.prefix &&
         a.text == b.text && a.name == b.name && a.op == b.op && a.keys == b.keys &&
         lists_equal(a.children, b.children);
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name || a.params != b.params || a.locals != b.locals ||
      a.marker != b.marker || a.synthetic != b.synthetic || a.decls.size() != b.decls.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.decls.size(); ++i) {
    if (a.decls[i].name != b.decls[i].name || !both_null_or_equal(a.decls[i].init, b.decls[i].init)) {
      return false;
    }
  }
  return both_null_or_equal(a.expr, b.expr) && both_null_or_equal(a.update, b.update) &&
         both_null_or_equal(a.init, b.init) && both_null_or_equal(a.body, b.body) &&
         both_null_or_equal(a.alt, b.alt) && lists_equal(a.block, b.block);
}

bool structurally_equal(const Script& a, const Script& b) { return lists_equal(a.body, b.body); }

}  // namespace wmr
