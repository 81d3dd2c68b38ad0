#include "auto_candidates.hpp"

namespace wmr {

std::string synthetic_name(const SourceSpan& span) {
  return "stmt@" + std::to_string(span.line) + ":" + std::to_string(span.column);
}

namespace {

StmtPtr marker(const Stmt& wrapped, MarkerKind kind) {
  auto m = std::make_unique<Stmt>();
  m->kind = StmtKind::Marker;
  m->marker = kind;
  m->span = wrapped.span;
  m->synthetic = true;
  if (kind == MarkerKind::Set) m->name = synthetic_name(wrapped.span);
  return m;
}

void rewrite_list(std::vector<StmtPtr>& list, int level, int depth);

// Nested statement slot (loop/if body). Single statements become blocks when they need wrapping.
void rewrite_body(StmtPtr& body, int level, int depth) {
  if (!body) return;
  if (body->kind == StmtKind::Block) {
    rewrite_list(body->block, level, depth);
    return;
  }
  if (body->kind == StmtKind::Marker) {
    auto empty = std::make_unique<Stmt>();
    empty->kind = StmtKind::Empty;
    empty->span = body->span;
    body = std::move(empty);
    return;
  }
  if (level > depth) {
    std::vector<StmtPtr> single;
    single.push_back(std::move(body));
    rewrite_list(single, level, depth);
    body = std::move(single.front());
    return;
  }
  auto block = std::make_unique<Stmt>();
  block->kind = StmtKind::Block;
  block->span = body->span;
  block->block.push_back(std::move(body));
  rewrite_list(block->block, level, depth);
  body = std::move(block);
}

void rewrite_children(Stmt& s, int level, int depth) {
  switch (s.kind) {
    case StmtKind::Block: rewrite_list(s.block, level + 1, depth); break;
    case StmtKind::Function: rewrite_list(s.block, level + 1, depth); break;
    case StmtKind::While:
    case StmtKind::For: rewrite_body(s.body, level + 1, depth); break;
    case StmtKind::If:
      rewrite_body(s.body, level + 1, depth);
      rewrite_body(s.alt, level + 1, depth);
      break;
    default: break;
  }
}

void rewrite_list(std::vector<StmtPtr>& list, int level, int depth) {
  std::vector<StmtPtr> out;
  out.reserve(list.size());
  for (auto& s : list) {
    if (s->kind == StmtKind::Marker) continue;
    rewrite_children(*s, level, depth);
    if (s->kind == StmtKind::Function || level > depth) {
      out.push_back(std::move(s));
      continue;
    }
    out.push_back(marker(*s, MarkerKind::Set));
    StmtPtr reset = marker(*s, MarkerKind::Reset);
    out.push_back(std::move(s));
    out.push_back(std::move(reset));
  }
  list = std::move(out);
}

}  // namespace

Script auto_candidates(const Script& script, int depth) {
  Script out = script.clone();
  rewrite_list(out.body, 0, depth);
  return out;
}

}  // namespace wmr
