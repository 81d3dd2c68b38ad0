#include "parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <set>

namespace wmr {

ParseError::ParseError(std::vector<SyntaxError> errors)
    : std::runtime_error(errors.empty() ? std::string("syntax error")
                                        : to_string(errors.front().span) + ": " + errors.front().message),
      errors_(std::move(errors)) {}

namespace {

enum class TokKind { Number, String, Identifier, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  double number = 0;
  std::u16string str;
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  bool newline_before = false;
};

struct Failure {
  SyntaxError error;
};

const std::set<std::string, std::less<>> kKeywords = {
    "var", "function", "return", "while", "for", "if", "else", "break", "continue", "true", "false", "null", "new"};

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::End: return "end of input";
    case TokKind::String: return "string literal";
    case TokKind::Number: return "number '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

void append_utf16(std::u16string& out, char32_t cp) {
  if (cp >= 0x10000) {
    cp -= 0x10000;
    out.push_back(static_cast<char16_t>(0xd800 + (cp >> 10)));
    out.push_back(static_cast<char16_t>(0xdc00 + (cp & 0x3ff)));
  } else {
    out.push_back(static_cast<char16_t>(cp));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool newline = skip_trivia();
      Token t = next();
      t.newline_before = newline;
      out.push_back(std::move(t));
      if (out.back().kind == TokKind::End) break;
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xc0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, std::uint32_t len = 1) const {
    throw Failure{{{line_, col_, len}, msg}};
  }

  bool skip_trivia() {
    bool newline = false;
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == '\n') {
        newline = true;
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) {
          if (peek() == '\n') newline = true;
          advance();
        }
        if (pos_ >= src_.size()) fail("unterminated block comment");
        advance();
        advance();
      } else {
        break;
      }
    }
    return newline;
  }

  Token start() const {
    Token t;
    t.offset = static_cast<std::uint32_t>(pos_);
    t.line = line_;
    t.column = col_;
    return t;
  }

  void finish(Token& t) const { t.length = static_cast<std::uint32_t>(pos_ - t.offset); }

  Token next() {
    Token t = start();
    if (pos_ >= src_.size()) {
      t.kind = TokKind::End;
      return t;
    }
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number(t);
    } else if (c == '\'' || c == '"') {
      lex_string(t);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '$') advance();
      t.kind = TokKind::Identifier;
      t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
    } else {
      lex_punct(t);
    }
    finish(t);
    return t;
  }

  void lex_number(Token& t) {
    t.kind = TokKind::Number;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      std::size_t digits = pos_;
      while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
      if (pos_ == digits) fail("malformed hex literal");
      std::uint64_t v = 0;
      std::from_chars(src_.data() + digits, src_.data() + pos_, v, 16);
      t.number = static_cast<double>(v);
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.') {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      t.number = std::strtod(std::string(src_.substr(t.offset, pos_ - t.offset)).c_str(), nullptr);
    }
    if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_') fail("identifier directly after number");
    t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
  }

  unsigned hex_digits(int count) {
    unsigned v = 0;
    for (int i = 0; i < count; ++i) {
      char c = peek();
      if (!std::isxdigit(static_cast<unsigned char>(c))) fail("malformed escape sequence");
      v = v * 16 + static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10));
      advance();
    }
    return v;
  }

  void lex_string(Token& t) {
    t.kind = TokKind::String;
    const char quote = peek();
    advance();
    for (;;) {
      if (pos_ >= src_.size() || peek() == '\n') fail("unterminated string literal");
      char c = peek();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        if (pos_ >= src_.size()) fail("unterminated string literal");
        advance();
        switch (e) {
          case 'n': t.str.push_back(u'\n'); break;
          case 't': t.str.push_back(u'\t'); break;
          case 'r': t.str.push_back(u'\r'); break;
          case '0': t.str.push_back(u'\0'); break;
          case 'x': t.str.push_back(static_cast<char16_t>(hex_digits(2))); break;
          case 'u': t.str.push_back(static_cast<char16_t>(hex_digits(4))); break;
          default: t.str.push_back(static_cast<char16_t>(static_cast<unsigned char>(e))); break;
        }
        continue;
      }
      // UTF-8 decode
      auto b0 = static_cast<unsigned char>(c);
      int extra = b0 < 0x80 ? 0 : (b0 >> 5) == 0x6 ? 1 : (b0 >> 4) == 0xe ? 2 : (b0 >> 3) == 0x1e ? 3 : -1;
      if (extra < 0) fail("invalid UTF-8 in string literal");
      char32_t cp = extra == 0 ? b0 : (b0 & (0x3f >> extra));
      advance();
      for (int i = 0; i < extra; ++i) {
        auto b = static_cast<unsigned char>(peek());
        if ((b & 0xc0) != 0x80) fail("invalid UTF-8 in string literal");
        cp = (cp << 6) | (b & 0x3f);
        advance();
      }
      append_utf16(t.str, cp);
    }
  }

  void lex_punct(Token& t) {
    static const std::array<std::string_view, 12> kLong = {"===", "!==", "==", "!=", "<=", ">=",
                                                           "&&",  "||",  "++", "--", "+=", "-="};
    t.kind = TokKind::Punct;
    for (auto p : kLong) {
      if (src_.substr(pos_, p.size()) == p) {
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        t.text = std::string(p);
        return;
      }
    }
    static constexpr std::string_view kSingle = "(){}[];,.=+-*/%<>!:";
    if (kSingle.find(peek()) == std::string_view::npos) {
      fail(std::string("unexpected character '") + peek() + "'");
    }
    t.text = std::string(1, peek());
    advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

bool is_marker_callee(const Expr& e) {
  return e.kind == ExprKind::Identifier && (e.name == "setMarker" || e.name == "resetMarker");
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  std::vector<StmtPtr> program(std::vector<SyntaxError>& errors) {
    std::vector<StmtPtr> out;
    while (!at_end()) {
      try {
        out.push_back(statement());
      } catch (const Failure& f) {
        errors.push_back(f.error);
        synchronize();
      }
    }
    return out;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& prev() const { return toks_[pos_ - 1]; }
  bool at_end() const { return cur().kind == TokKind::End; }

  bool is_punct(std::string_view p) const { return cur().kind == TokKind::Punct && cur().text == p; }
  bool is_keyword(std::string_view k) const { return cur().kind == TokKind::Identifier && cur().text == k; }

  const Token& advance() {
    if (!at_end()) ++pos_;
    return prev();
  }

  bool accept(std::string_view p) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    throw Failure{{{cur().line, cur().column, std::max<std::uint32_t>(cur().length, 1)}, message}};
  }

  void expect(std::string_view p) {
    if (!accept(p)) fail_here("expected '" + std::string(p) + "' but found " + describe(cur()));
  }

  std::string expect_identifier(std::string_view what) {
    if (cur().kind != TokKind::Identifier || kKeywords.count(cur().text)) {
      fail_here("expected " + std::string(what) + " but found " + describe(cur()));
    }
    return advance().text;
  }

  void consume_semicolon() {
    if (accept(";")) return;
    if (is_punct("}") || at_end() || cur().newline_before) return;
    fail_here("expected ';' but found " + describe(cur()));
  }

  void synchronize() {
    std::size_t start = pos_;
    while (!at_end()) {
      if (is_punct(";")) {
        advance();
        return;
      }
      if (is_punct("}")) {
        if (pos_ == start) advance();
        return;
      }
      advance();
    }
  }

  SourceSpan span_from(const Token& first) const {
    const Token& last = pos_ > 0 ? prev() : first;
    const std::uint32_t end = std::max(last.offset + last.length, first.offset + first.length);
    return {first.line, first.column, end - first.offset};
  }

  void reject_marker_calls(const Expr& e) const {
    if (e.kind == ExprKind::Call && is_marker_callee(*e.children[0])) {
      throw Failure{{e.span, e.children[0]->name + " must be called as a statement"}};
    }
    for (const auto& c : e.children) reject_marker_calls(*c);
  }

  ExprPtr checked_expression() {
    auto e = expression();
    reject_marker_calls(*e);
    return e;
  }

  // ---- statements -------------------------------------------------------

  StmtPtr statement() {
    const Token first = cur();
    auto s = std::make_unique<Stmt>();
    if (is_punct("{")) {
      s->kind = StmtKind::Block;
      advance();
      ++depth_;
      while (!is_punct("}")) {
        if (at_end()) fail_here("expected '}' but found end of input");
        s->block.push_back(statement());
      }
      --depth_;
      advance();
    } else if (is_punct(";")) {
      s->kind = StmtKind::Empty;
      advance();
    } else if (is_keyword("var")) {
      advance();
      var_declarations(*s);
      consume_semicolon();
    } else if (is_keyword("function")) {
      if (depth_ > 0) fail_here("function declarations are only allowed at top level");
      function_declaration(*s);
    } else if (is_keyword("if")) {
      s->kind = StmtKind::If;
      advance();
      expect("(");
      s->expr = checked_expression();
      expect(")");
      s->body = nested_statement();
      if (is_keyword("else")) {
        advance();
        s->alt = nested_statement();
      }
    } else if (is_keyword("while")) {
      s->kind = StmtKind::While;
      advance();
      expect("(");
      s->expr = checked_expression();
      expect(")");
      ++loop_depth_;
      s->body = nested_statement();
      --loop_depth_;
    } else if (is_keyword("for")) {
      for_statement(*s);
    } else if (is_keyword("return")) {
      if (!in_function_) fail_here("'return' outside of a function");
      s->kind = StmtKind::Return;
      advance();
      if (!is_punct(";") && !is_punct("}") && !at_end() && !cur().newline_before) s->expr = checked_expression();
      consume_semicolon();
    } else if (is_keyword("break") || is_keyword("continue")) {
      if (loop_depth_ == 0) fail_here("'" + cur().text + "' outside of a loop");
      s->kind = is_keyword("break") ? StmtKind::Break : StmtKind::Continue;
      advance();
      consume_semicolon();
    } else {
      auto e = expression();
      if (e->kind == ExprKind::Call && is_marker_callee(*e->children[0])) {
        marker_statement(*s, std::move(e));
      } else {
        reject_marker_calls(*e);
        s->kind = StmtKind::Expression;
        s->expr = std::move(e);
      }
      consume_semicolon();
    }
    s->span = span_from(first);
    return s;
  }

  StmtPtr nested_statement() {
    ++depth_;
    auto s = statement();
    --depth_;
    return s;
  }

  void var_declarations(Stmt& s) {
    s.kind = StmtKind::Var;
    do {
      VarDecl d;
      d.name = expect_identifier("variable name");
      if (accept("=")) d.init = assignment_checked();
      s.decls.push_back(std::move(d));
    } while (accept(","));
  }

  ExprPtr assignment_checked() {
    auto e = assignment();
    reject_marker_calls(*e);
    return e;
  }

  void marker_statement(Stmt& s, ExprPtr call) {
    s.kind = StmtKind::Marker;
    const std::string& callee = call->children[0]->name;
    const std::size_t argc = call->children.size() - 1;
    if (callee == "setMarker") {
      if (argc != 1) throw Failure{{call->span, "setMarker expects exactly one argument"}};
      s.marker = MarkerKind::Set;
      s.expr = std::move(call->children[1]);
      reject_marker_calls(*s.expr);
    } else {
      if (argc != 0) throw Failure{{call->span, "resetMarker expects no arguments"}};
      s.marker = MarkerKind::Reset;
    }
  }

  void for_statement(Stmt& s) {
    s.kind = StmtKind::For;
    advance();
    expect("(");
    if (!is_punct(";")) {
      const Token first = cur();
      auto init = std::make_unique<Stmt>();
      if (is_keyword("var")) {
        advance();
        var_declarations(*init);
      } else {
        init->kind = StmtKind::Expression;
        init->expr = checked_expression();
      }
      init->span = span_from(first);
      s.init = std::move(init);
    }
    expect(";");
    if (!is_punct(";")) s.expr = checked_expression();
    expect(";");
    if (!is_punct(")")) s.update = checked_expression();
    expect(")");
    ++loop_depth_;
    s.body = nested_statement();
    --loop_depth_;
  }

  void function_declaration(Stmt& s) {
    s.kind = StmtKind::Function;
    advance();
    s.name = expect_identifier("function name");
    expect("(");
    if (!is_punct(")")) {
      do {
        s.params.push_back(expect_identifier("parameter name"));
      } while (accept(","));
    }
    expect(")");
    if (!is_punct("{")) fail_here("expected '{' but found " + describe(cur()));
    advance();
    const bool saved_in_function = in_function_;
    const int saved_loop = loop_depth_;
    in_function_ = true;
    loop_depth_ = 0;
    ++depth_;
    while (!is_punct("}")) {
      if (at_end()) fail_here("expected '}' but found end of input");
      s.block.push_back(statement());
    }
    advance();
    --depth_;
    in_function_ = saved_in_function;
    loop_depth_ = saved_loop;

    s.locals = s.params;
    for (const auto& st : s.block) collect_vars(*st, s.locals);
  }

  static void collect_vars(const Stmt& st, std::vector<std::string>& out) {
    auto add = [&](const std::string& n) {
      if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
    };
    if (st.kind == StmtKind::Var) {
      for (const auto& d : st.decls) add(d.name);
    }
    if (st.init) collect_vars(*st.init, out);
    if (st.body) collect_vars(*st.body, out);
    if (st.alt) collect_vars(*st.alt, out);
    for (const auto& b : st.block) collect_vars(*b, out);
  }

  // ---- expressions ------------------------------------------------------

  ExprPtr make(ExprKind kind, const Token& first) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->span = {first.line, first.column, first.length};
    return e;
  }

  void close_span(Expr& e, const Token& first) const { e.span = span_from(first); }

  ExprPtr expression() { return assignment(); }

  ExprPtr assignment() {
    const Token first = cur();
    auto lhs = logical_or();
    if (is_punct("=") || is_punct("+=") || is_punct("-=")) {
      if (lhs->kind != ExprKind::Identifier && lhs->kind != ExprKind::Member && lhs->kind != ExprKind::Index) {
        fail_here("invalid assignment target");
      }
      auto e = make(ExprKind::Assign, first);
      e->op = advance().text;
      e->children.push_back(std::move(lhs));
      e->children.push_back(assignment());
      close_span(*e, first);
      return e;
    }
    return lhs;
  }

  template <typename Next>
  ExprPtr binary_level(std::initializer_list<std::string_view> ops, ExprKind kind, Next next) {
    const Token first = cur();
    auto lhs = (this->*next)();
    for (;;) {
      auto it = std::find_if(ops.begin(), ops.end(), [&](std::string_view op) { return is_punct(op); });
      if (it == ops.end()) return lhs;
      auto e = make(kind, first);
      e->op = advance().text;
      e->children.push_back(std::move(lhs));
      e->children.push_back((this->*next)());
      close_span(*e, first);
      lhs = std::move(e);
    }
  }

  ExprPtr logical_or() { return binary_level({"||"}, ExprKind::Logical, &Parser::logical_and); }
  ExprPtr logical_and() { return binary_level({"&&"}, ExprKind::Logical, &Parser::equality); }
  ExprPtr equality() { return binary_level({"===", "!==", "==", "!="}, ExprKind::Binary, &Parser::relational); }
  ExprPtr relational() { return binary_level({"<=", ">=", "<", ">"}, ExprKind::Binary, &Parser::additive); }
  ExprPtr additive() { return binary_level({"+", "-"}, ExprKind::Binary, &Parser::multiplicative); }
  ExprPtr multiplicative() { return binary_level({"*", "/", "%"}, ExprKind::Binary, &Parser::unary); }

  ExprPtr unary() {
    const Token first = cur();
    if (is_punct("!") || is_punct("-") || is_punct("+")) {
      auto e = make(ExprKind::Unary, first);
      e->op = advance().text;
      e->children.push_back(unary());
      close_span(*e, first);
      return e;
    }
    if (is_punct("++") || is_punct("--")) {
      auto e = make(ExprKind::Update, first);
      e->op = advance().text;
      e->prefix = true;
      auto target = unary();
      if (target->kind != ExprKind::Identifier && target->kind != ExprKind::Member &&
          target->kind != ExprKind::Index) {
        fail_here("invalid increment target");
      }
      e->children.push_back(std::move(target));
      close_span(*e, first);
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    const Token first = cur();
    auto e = call_member();
    if ((is_punct("++") || is_punct("--")) && !cur().newline_before) {
      if (e->kind != ExprKind::Identifier && e->kind != ExprKind::Member && e->kind != ExprKind::Index) {
        fail_here("invalid increment target");
      }
      auto u = make(ExprKind::Update, first);
      u->op = advance().text;
      u->prefix = false;
      u->children.push_back(std::move(e));
      close_span(*u, first);
      return u;
    }
    return e;
  }

  void arguments(Expr& e) {
    expect("(");
    if (!is_punct(")")) {
      do {
        e.children.push_back(assignment());
      } while (accept(","));
    }
    expect(")");
  }

  ExprPtr call_member() {
    const Token first = cur();
    auto e = primary();
    for (;;) {
      if (accept(".")) {
        auto m = make(ExprKind::Member, first);
        if (cur().kind != TokKind::Identifier) fail_here("expected property name but found " + describe(cur()));
        m->name = advance().text;
        m->children.push_back(std::move(e));
        close_span(*m, first);
        e = std::move(m);
      } else if (is_punct("[")) {
        advance();
        auto ix = make(ExprKind::Index, first);
        ix->children.push_back(std::move(e));
        ix->children.push_back(expression());
        expect("]");
        close_span(*ix, first);
        e = std::move(ix);
      } else if (is_punct("(")) {
        auto c = make(ExprKind::Call, first);
        c->children.push_back(std::move(e));
        arguments(*c);
        close_span(*c, first);
        e = std::move(c);
      } else {
        return e;
      }
    }
  }

  ExprPtr primary() {
    const Token first = cur();
    switch (cur().kind) {
      case TokKind::Number: {
        auto e = make(ExprKind::Number, first);
        e->number = advance().number;
        return e;
      }
      case TokKind::String: {
        auto e = make(ExprKind::String, first);
        e->text = advance().str;
        return e;
      }
      case TokKind::Identifier: {
        if (is_keyword("true") || is_keyword("false")) {
          auto e = make(ExprKind::Bool, first);
          e->boolean = advance().text == "true";
          return e;
        }
        if (is_keyword("null")) {
          advance();
          return make(ExprKind::Null, first);
        }
        if (is_keyword("new")) {
          advance();
          auto e = make(ExprKind::New, first);
          e->name = expect_identifier("constructor name");
          if (is_punct("(")) arguments(*e);
          close_span(*e, first);
          return e;
        }
        if (kKeywords.count(cur().text)) fail_here("unexpected keyword '" + cur().text + "'");
        auto e = make(ExprKind::Identifier, first);
        e->name = advance().text;
        return e;
      }
      case TokKind::Punct:
        if (accept("(")) {
          auto e = expression();
          expect(")");
          return e;
        }
        if (accept("[")) {
          auto e = make(ExprKind::ArrayLiteral, first);
          if (!is_punct("]")) {
            do {
              e->children.push_back(assignment());
            } while (accept(","));
          }
          expect("]");
          close_span(*e, first);
          return e;
        }
        if (accept("{")) {
          auto e = make(ExprKind::ObjectLiteral, first);
          if (!is_punct("}")) {
            do {
              if (cur().kind == TokKind::Identifier) {
                e->keys.push_back(advance().text);
              } else if (cur().kind == TokKind::String) {
                const auto& s = advance().str;
                e->keys.emplace_back(s.begin(), s.end());
              } else {
                fail_here("expected property key but found " + describe(cur()));
              }
              expect(":");
              e->children.push_back(assignment());
            } while (accept(","));
          }
          expect("}");
          close_span(*e, first);
          return e;
        }
        break;
      case TokKind::End:
        break;
    }
    fail_here("expected expression but found " + describe(cur()));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  int loop_depth_ = 0;
  bool in_function_ = false;
};

}  // namespace

Script parse(std::string_view source) {
  std::vector<Token> tokens;
  try {
    tokens = Lexer(source).run();
  } catch (const Failure& f) {
    throw ParseError({f.error});
  }
  std::vector<SyntaxError> errors;
  Parser parser(std::move(tokens));
  Script script;
  script.source = std::string(source);
  script.body = parser.program(errors);
  if (!errors.empty()) throw ParseError(std::move(errors));
  return script;
}

}  // namespace wmr
