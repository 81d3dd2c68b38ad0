#include "printer.hpp"

#include <cctype>
#include <cstdio>

#include "text.hpp"

namespace wmr {

namespace {

bool is_plain_key(const std::string& k) {
  if (k.empty() || std::isdigit(static_cast<unsigned char>(k[0]))) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '$') return false;
  }
  return true;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

}  // namespace

std::string quote_string(const std::u16string& text) {
  std::string out = "'";
  for (char16_t c : text) {
    if (c == u'\'') {
      out += "\\'";
    } else if (c == u'\\') {
      out += "\\\\";
    } else if (c >= 0x20 && c < 0x7f) {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
      out += buf;
    }
  }
  return out + "'";
}

std::string print(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number: return e.number < 0 ? "(" + format_number(e.number) + ")" : format_number(e.number);
    case ExprKind::String: return quote_string(e.text);
    case ExprKind::Bool: return e.boolean ? "true" : "false";
    case ExprKind::Null: return "null";
    case ExprKind::Identifier: return e.name;
    case ExprKind::ArrayLiteral: {
      std::string out = "[";
      for (std::size_t i = 0; i < e.children.size(); ++i) out += (i ? ", " : "") + print(*e.children[i]);
      return out + "]";
    }
    case ExprKind::ObjectLiteral: {
      std::string out = "({";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        const auto& k = e.keys[i];
        out += (i ? ", " : "") + (is_plain_key(k) ? k : quote_string(std::u16string(k.begin(), k.end()))) + ": " +
               print(*e.children[i]);
      }
      return out + "})";
    }
    case ExprKind::Unary: return "(" + e.op + print(*e.children[0]) + ")";
    case ExprKind::Binary:
    case ExprKind::Logical:
      return "(" + print(*e.children[0]) + " " + e.op + " " + print(*e.children[1]) + ")";
    case ExprKind::Assign: return "(" + print(*e.children[0]) + " " + e.op + " " + print(*e.children[1]) + ")";
    case ExprKind::Update:
      return e.prefix ? "(" + e.op + print(*e.children[0]) + ")" : "(" + print(*e.children[0]) + e.op + ")";
    case ExprKind::Call: {
      std::string out = print(*e.children[0]) + "(";
      for (std::size_t i = 1; i < e.children.size(); ++i) out += (i > 1 ? ", " : "") + print(*e.children[i]);
      return out + ")";
    }
    case ExprKind::Member: return print(*e.children[0]) + "." + e.name;
    case ExprKind::Index: return print(*e.children[0]) + "[" + print(*e.children[1]) + "]";
    case ExprKind::New: {
      std::string out = "new " + e.name + "(";
      for (std::size_t i = 0; i < e.children.size(); ++i) out += (i ? ", " : "") + print(*e.children[i]);
      return out + ")";
    }
  }
  return "";
}

namespace {

std::string print_decls(const Stmt& s) {
  std::string out = "var ";
  for (std::size_t i = 0; i < s.decls.size(); ++i) {
    out += (i ? ", " : "") + s.decls[i].name;
    if (s.decls[i].init) out += " = " + print(*s.decls[i].init);
  }
  return out;
}

std::string print_body(const Stmt& body, int indent) {
  // Non-block bodies are printed on their own line, one level deeper.
  if (body.kind == StmtKind::Block) return " " + print(body, indent).substr(pad(indent).size());
  return "\n" + print(body, indent + 1);
}

}  // namespace

std::string print(const Stmt& s, int indent) {
  const std::string p = pad(indent);
  switch (s.kind) {
    case StmtKind::Var: return p + print_decls(s) + ";\n";
    case StmtKind::Expression: return p + print(*s.expr) + ";\n";
    case StmtKind::Empty: return p + ";\n";
    case StmtKind::Block: {
      std::string out = p + "{\n";
      for (const auto& b : s.block) out += print(*b, indent + 1);
      return out + p + "}\n";
    }
    case StmtKind::While: return p + "while (" + print(*s.expr) + ")" + print_body(*s.body, indent);
    case StmtKind::For: {
      std::string init;
      if (s.init) init = s.init->kind == StmtKind::Var ? print_decls(*s.init) : print(*s.init->expr);
      return p + "for (" + init + "; " + (s.expr ? print(*s.expr) : "") + "; " + (s.update ? print(*s.update) : "") +
             ")" + print_body(*s.body, indent);
    }
    case StmtKind::If: {
      std::string out = p + "if (" + print(*s.expr) + ")" + print_body(*s.body, indent);
      if (s.alt) out += p + "else" + print_body(*s.alt, indent);
      return out;
    }
    case StmtKind::Function: {
      std::string out = p + "function " + s.name + "(";
      for (std::size_t i = 0; i < s.params.size(); ++i) out += (i ? ", " : "") + s.params[i];
      out += ") {\n";
      for (const auto& b : s.block) out += print(*b, indent + 1);
      return out + p + "}\n";
    }
    case StmtKind::Return: return p + "return" + (s.expr ? " " + print(*s.expr) : "") + ";\n";
    case StmtKind::Break: return p + "break;\n";
    case StmtKind::Continue: return p + "continue;\n";
    case StmtKind::Marker:
      if (s.marker == MarkerKind::Reset) return p + "resetMarker();\n";
      if (!s.expr) return p + "setMarker(" + quote_string(ascii_to_u16(s.name)) + ");\n";
      return p + "setMarker(" + print(*s.expr) + ");\n";
  }
  return "";
}

std::string print(const Script& script) {
  std::string out;
  for (const auto& s : script.body) out += print(*s, 0);
  return out;
}

}  // namespace wmr
