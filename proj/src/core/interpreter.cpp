#include "interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <unordered_set>

#include "errors.hpp"
#include "text.hpp"

namespace wmr {

StringObj::~StringObj() {
  if (!heap || !link) return;
  link->live_string_bytes -= byte_size();
  if (link->model) link->model->free(owner, addr);
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Terminated: return "Terminated";
    case RunStatus::TimedOut: return "TimedOut";
    case RunStatus::ScriptError: return "ScriptError";
    case RunStatus::Aborted: return "Aborted";
  }
  return "?";
}

RunStatus run_status_from_string(std::string_view text) {
  for (auto s : {RunStatus::Terminated, RunStatus::TimedOut, RunStatus::ScriptError, RunStatus::Aborted}) {
    if (to_string(s) == text) return s;
  }
  throw std::invalid_argument("unknown outcome '" + std::string(text) + "'");
}

namespace {

struct TimeoutSignal {};

constexpr std::size_t kMaxArrayLength = 1u << 24;

const std::unordered_set<std::string>& builtin_names() {
  static const std::unordered_set<std::string> names = {
      "unescape",    "domCreate",  "domClear",      "collectGarbage", "plantUAF",
      "triggerVirtualCall", "pivotGadget", "setInterval", "setTimeout", "clearInterval", "clearTimeout"};
  return names;
}

std::string type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "undefined";
    case 1: return "null";
    case 2: return "boolean";
    case 3: return "number";
    case 4: return "string";
    case 5: return "array";
    case 6: return "object";
    case 7: return "function";
    default: return "element";
  }
}

std::vector<std::uint8_t> encode_utf16le(std::u16string_view text) {
  std::vector<std::uint8_t> out(text.size() * 2);
  for (std::size_t i = 0; i < text.size(); ++i) {
    out[2 * i] = static_cast<std::uint8_t>(text[i] & 0xff);
    out[2 * i + 1] = static_cast<std::uint8_t>(text[i] >> 8);
  }
  return out;
}

std::u16string decode_utf16le(const std::vector<std::uint8_t>& bytes) {
  std::u16string out(bytes.size() / 2, u'\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<char16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
  }
  return out;
}

int hex_digit(char16_t c) {
  if (c >= u'0' && c <= u'9') return c - u'0';
  if (c >= u'a' && c <= u'f') return c - u'a' + 10;
  if (c >= u'A' && c <= u'F') return c - u'A' + 10;
  return -1;
}

std::u16string unescape_text(const std::u16string& in) {
  std::u16string out;
  out.reserve(in.size());
  auto hex_run = [&](std::size_t at, std::size_t n) -> int {
    if (at + n > in.size()) return -1;
    int v = 0;
    for (std::size_t k = 0; k < n; ++k) {
      int d = hex_digit(in[at + k]);
      if (d < 0) return -1;
      v = v * 16 + d;
    }
    return v;
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == u'%') {
      if (i + 1 < in.size() && in[i + 1] == u'u') {
        if (int v = hex_run(i + 2, 4); v >= 0) {
          out.push_back(static_cast<char16_t>(v));
          i += 5;
          continue;
        }
      } else if (int v = hex_run(i + 1, 2); v >= 0) {
        out.push_back(static_cast<char16_t>(v));
        i += 2;
        continue;
      }
    }
    out.push_back(in[i]);
  }
  return out;
}

double parse_number(const std::u16string& text) {
  std::string s = to_utf8(text);
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return 0;
  s = s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  char* end = nullptr;
  double v;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    v = static_cast<double>(std::strtoull(s.c_str() + 2, &end, 16));
  } else {
    v = std::strtod(s.c_str(), &end);
  }
  return (end && *end == '\0') ? v : std::nan("");
}

std::int64_t to_integer(double v) {
  if (std::isnan(v)) return 0;
  if (std::isinf(v)) return v > 0 ? INT64_MAX : INT64_MIN;
  return static_cast<std::int64_t>(std::trunc(v));
}

bool is_array_index(double v) { return v >= 0 && v == std::floor(v) && v < static_cast<double>(kMaxArrayLength); }

template <typename Props>
Value* find_prop(Props& props, const std::string& key) {
  for (auto& [k, v] : props) {
    if (k == key) return &v;
  }
  return nullptr;
}

template <typename Props>
void put_prop(Props& props, const std::string& key, Value value) {
  if (Value* v = find_prop(props, key)) {
    *v = std::move(value);
  } else {
    props.emplace_back(key, std::move(value));
  }
}

}  // namespace

Interpreter::Interpreter(const Script& script, MemoryModel& model, EventBus& bus, InterpreterOptions options)
    : script_(script), model_(model), bus_(bus), options_(options), link_(std::make_shared<HeapLink>()) {
  link_->model = &model_;
}

Interpreter::~Interpreter() { link_->model = nullptr; }

const Value* Interpreter::global(const std::string& name) const {
  auto it = globals_.find(name);
  return it == globals_.end() ? nullptr : &it->second;
}

RunOutcome Interpreter::run() {
  RunOutcome out;
  try {
    for (const auto& s : script_.body) {
      if (s->kind == StmtKind::Function) globals_[s->name] = FunctionRef{s.get()};
    }
    for (const auto& s : script_.body) {
      Flow f = exec(*s);
      if (f == Flow::Return) break;
      if (f != Flow::Normal) throw ScriptError(s->span, "break or continue outside a loop");
    }
  } catch (const ScriptError& e) {
    out.status = RunStatus::ScriptError;
    out.reason = e.what();
    out.location = e.span();
  } catch (const TimeoutSignal&) {
    out.status = RunStatus::TimedOut;
    out.reason = "event limit reached";
  } catch (const OutOfMemory& e) {
    out.status = RunStatus::Aborted;
    out.reason = std::string("out of memory: ") + e.what();
  }
  frames_.clear();
  out.event_count = bus_.count();
  return out;
}

// ---- statements ----

Interpreter::Flow Interpreter::exec(const Stmt& s) {
  if (s.kind == StmtKind::Marker) {
    exec_marker(s);
    return Flow::Normal;
  }
  if (s.kind == StmtKind::Function) return Flow::Normal;
  if (bus_.exhausted()) throw TimeoutSignal{};
  bus_.emit(StmtBeginEvent{s.span, is_compound(s.kind)});
  Flow f = exec_inner(s);
  bus_.emit(StmtEndEvent{s.span});
  return f;
}

Interpreter::Flow Interpreter::exec_list(const std::vector<StmtPtr>& list) {
  for (const auto& s : list) {
    Flow f = exec(*s);
    if (f != Flow::Normal) return f;
  }
  return Flow::Normal;
}

Interpreter::Flow Interpreter::exec_inner(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Var:
      for (const auto& d : s.decls) {
        if (d.init) {
          Value v = eval(*d.init);
          slot(d.name) = std::move(v);
        } else {
          slot(d.name);
        }
      }
      return Flow::Normal;
    case StmtKind::Expression: eval(*s.expr); return Flow::Normal;
    case StmtKind::Block: return exec_list(s.block);
    case StmtKind::While:
      while (truthy(eval(*s.expr))) {
        Flow f = exec(*s.body);
        if (f == Flow::Break) break;
        if (f == Flow::Return) return f;
      }
      return Flow::Normal;
    case StmtKind::For:
      if (s.init) exec_inner(*s.init);
      while (!s.expr || truthy(eval(*s.expr))) {
        Flow f = exec(*s.body);
        if (f == Flow::Break) break;
        if (f == Flow::Return) return f;
        if (s.update) eval(*s.update);
      }
      return Flow::Normal;
    case StmtKind::If:
      if (truthy(eval(*s.expr))) return exec(*s.body);
      if (s.alt) return exec(*s.alt);
      return Flow::Normal;
    case StmtKind::Return: {
      Value v = s.expr ? eval(*s.expr) : Value{Undefined{}};
      if (!frames_.empty()) frames_.back().return_value = std::move(v);
      return Flow::Return;
    }
    case StmtKind::Break: return Flow::Break;
    case StmtKind::Continue: return Flow::Continue;
    case StmtKind::Empty:
    case StmtKind::Function:
    case StmtKind::Marker: return Flow::Normal;
  }
  return Flow::Normal;
}

void Interpreter::exec_marker(const Stmt& s) {
  if (s.marker == MarkerKind::Reset) {
    bus_.emit(MarkerResetEvent{s.span});
    return;
  }
  std::string name = s.synthetic ? s.name : to_utf8(to_string_content(eval_pure(*s.expr)));
  if (marker_names_.count(name)) {
    int& k = marker_suffix_[name];
    std::string candidate;
    do {
      candidate = name + "#" + std::to_string(++k);
    } while (marker_names_.count(candidate));
    name = candidate;
  }
  marker_names_.insert(name);
  bus_.emit(MarkerSetEvent{name, s.span});
}

// Marker arguments must not perturb the run: no calls, no assignment, no heap strings.
Value Interpreter::eval_pure(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number: return e.number;
    case ExprKind::String: return constant_string(e.text);
    case ExprKind::Bool: return e.boolean;
    case ExprKind::Null: return Null{};
    case ExprKind::Identifier: {
      if (e.name == "undefined") return Undefined{};
      if (Value* v = lookup(e.name)) return *v;
      throw ScriptError(e.span, "'" + e.name + "' is not defined");
    }
    case ExprKind::Binary:
      if (e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/" || e.op == "%") {
        Value l = eval_pure(*e.children[0]);
        Value r = eval_pure(*e.children[1]);
        bool stringy = std::holds_alternative<StringRef>(l) || std::holds_alternative<StringRef>(r);
        if (e.op == "+" && stringy) return constant_string(to_string_content(l) + to_string_content(r));
        return eval_binary(e.op, l, r, e);
      }
      break;
    case ExprKind::Member:
      if (e.name == "length") {
        Value v = eval_pure(*e.children[0]);
        if (auto s = std::get_if<StringRef>(&v)) return static_cast<double>((*s)->length);
        if (auto a = std::get_if<ArrayRef>(&v)) return static_cast<double>((*a)->items.size());
      }
      break;
    default: break;
  }
  throw ScriptError(e.span, "marker name must be a side-effect-free expression");
}

// ---- expressions ----

Value Interpreter::eval(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Number: return e.number;
    case ExprKind::String: {
      auto& cached = literal_cache_[&e];
      if (!cached) cached = constant_string(e.text);
      return cached;
    }
    case ExprKind::Bool: return e.boolean;
    case ExprKind::Null: return Null{};
    case ExprKind::Identifier: {
      if (e.name == "undefined") return Undefined{};
      if (Value* v = lookup(e.name)) return *v;
      if (builtin_names().count(e.name)) throw ScriptError(e.span, "builtin '" + e.name + "' can only be called");
      throw ScriptError(e.span, "'" + e.name + "' is not defined");
    }
    case ExprKind::ArrayLiteral: {
      auto arr = std::make_shared<ArrayObj>();
      for (const auto& c : e.children) arr->items.push_back(eval(*c));
      return arr;
    }
    case ExprKind::ObjectLiteral: {
      auto obj = std::make_shared<ObjectObj>();
      for (std::size_t i = 0; i < e.children.size(); ++i) put_prop(obj->props, e.keys[i], eval(*e.children[i]));
      return obj;
    }
    case ExprKind::Unary: {
      Value v = eval(*e.children[0]);
      if (e.op == "!") return !truthy(v);
      if (e.op == "-") return -to_number(v, e);
      return to_number(v, e);
    }
    case ExprKind::Binary: {
      Value l = eval(*e.children[0]);
      Value r = eval(*e.children[1]);
      return eval_binary(e.op, l, r, e);
    }
    case ExprKind::Logical: {
      Value l = eval(*e.children[0]);
      if (e.op == "&&" ? !truthy(l) : truthy(l)) return l;
      return eval(*e.children[1]);
    }
    case ExprKind::Assign: return eval_assign(e);
    case ExprKind::Update: return eval_update(e);
    case ExprKind::Call: return eval_call(e);
    case ExprKind::Member: return eval_member(e);
    case ExprKind::Index: return eval_index(e);
    case ExprKind::New: {
      if (e.name == "Object" && e.children.empty()) return std::make_shared<ObjectObj>();
      if (e.name != "Array") throw ScriptError(e.span, "unknown constructor '" + e.name + "'");
      auto arr = std::make_shared<ArrayObj>();
      if (e.children.size() == 1) {
        Value n = eval(*e.children[0]);
        if (auto d = std::get_if<double>(&n)) {
          if (!is_array_index(*d)) throw ScriptError(e.span, "invalid array length");
          arr->items.resize(static_cast<std::size_t>(*d));
          return arr;
        }
        arr->items.push_back(std::move(n));
        return arr;
      }
      for (const auto& c : e.children) arr->items.push_back(eval(*c));
      return arr;
    }
  }
  return Undefined{};
}

Value Interpreter::eval_binary(const std::string& op, const Value& l, const Value& r, const Expr& at) {
  auto primitive = [](const Value& v) { return v.index() <= 3; };
  if (op == "+") {
    if (primitive(l) && primitive(r)) return to_number(l, at) + to_number(r, at);
    return concat(l, r);
  }
  if (op == "-") return to_number(l, at) - to_number(r, at);
  if (op == "*") return to_number(l, at) * to_number(r, at);
  if (op == "/") return to_number(l, at) / to_number(r, at);
  if (op == "%") return std::fmod(to_number(l, at), to_number(r, at));
  if (op == "===") return strict_equals(l, r);
  if (op == "!==") return !strict_equals(l, r);
  if (op == "==" || op == "!=") {
    auto nullish = [](const Value& v) { return v.index() <= 1; };
    bool eq;
    if (nullish(l) || nullish(r)) {
      eq = nullish(l) && nullish(r);
    } else if (l.index() != r.index() && primitive(l) != primitive(r)) {
      eq = false;
    } else if (l.index() != r.index() && (l.index() <= 4 && r.index() <= 4)) {
      eq = to_number(l, at) == to_number(r, at);
    } else {
      eq = strict_equals(l, r);
    }
    return op == "==" ? eq : !eq;
  }
  auto ls = std::get_if<StringRef>(&l);
  auto rs = std::get_if<StringRef>(&r);
  int cmp;
  if (ls && rs) {
    auto a = string_content(**ls);
    auto b = string_content(**rs);
    cmp = a < b ? -1 : (a == b ? 0 : 1);
  } else {
    double a = to_number(l, at);
    double b = to_number(r, at);
    if (std::isnan(a) || std::isnan(b)) return false;
    cmp = a < b ? -1 : (a == b ? 0 : 1);
  }
  if (op == "<") return cmp < 0;
  if (op == ">") return cmp > 0;
  if (op == "<=") return cmp <= 0;
  if (op == ">=") return cmp >= 0;
  throw ScriptError(at.span, "unsupported operator '" + op + "'");
}

Interpreter::LRef Interpreter::resolve(const Expr& target) {
  LRef ref;
  switch (target.kind) {
    case ExprKind::Identifier:
      ref.is_var = true;
      ref.var = target.name;
      return ref;
    case ExprKind::Member:
      ref.object = eval(*target.children[0]);
      ref.key = target.name;
      return ref;
    case ExprKind::Index: {
      ref.object = eval(*target.children[0]);
      Value idx = eval(*target.children[1]);
      if (auto d = std::get_if<double>(&idx); d && std::holds_alternative<ArrayRef>(ref.object)) {
        ref.numeric = true;
        ref.index = *d;
      } else {
        ref.key = to_utf8(to_string_content(idx));
      }
      return ref;
    }
    default: throw ScriptError(target.span, "invalid assignment target");
  }
}

Value Interpreter::load(const LRef& ref, const Expr& at) {
  if (ref.is_var) {
    if (Value* v = lookup(ref.var)) return *v;
    throw ScriptError(at.span, "'" + ref.var + "' is not defined");
  }
  if (ref.numeric) {
    const auto& items = std::get<ArrayRef>(ref.object)->items;
    if (!is_array_index(ref.index) || ref.index >= static_cast<double>(items.size())) return Undefined{};
    return items[static_cast<std::size_t>(ref.index)];
  }
  return get_property(ref.object, ref.key, at);
}

void Interpreter::store(const LRef& ref, Value value, const Expr& at) {
  if (ref.is_var) {
    slot(ref.var) = std::move(value);
    return;
  }
  if (ref.numeric) {
    auto& items = std::get<ArrayRef>(ref.object)->items;
    if (!is_array_index(ref.index)) throw ScriptError(at.span, "invalid array index");
    auto i = static_cast<std::size_t>(ref.index);
    if (i >= items.size()) items.resize(i + 1);
    items[i] = std::move(value);
    return;
  }
  set_property(ref.object, ref.key, std::move(value), at);
}

Value Interpreter::eval_assign(const Expr& e) {
  LRef ref = resolve(*e.children[0]);
  if (e.op == "=") {
    Value v = eval(*e.children[1]);
    store(ref, v, e);
    return v;
  }
  Value current = load(ref, e);
  Value rhs = eval(*e.children[1]);
  Value result = eval_binary(e.op.substr(0, 1), current, rhs, e);
  store(ref, result, e);
  return result;
}

Value Interpreter::eval_update(const Expr& e) {
  LRef ref = resolve(*e.children[0]);
  double old = to_number(load(ref, e), e);
  double now = e.op == "++" ? old + 1 : old - 1;
  store(ref, now, e);
  return e.prefix ? now : old;
}

Value Interpreter::eval_member(const Expr& e) {
  Value obj = eval(*e.children[0]);
  return get_property(obj, e.name, e);
}

Value Interpreter::eval_index(const Expr& e) {
  Value obj = eval(*e.children[0]);
  Value idx = eval(*e.children[1]);
  if (auto arr = std::get_if<ArrayRef>(&obj)) {
    if (auto d = std::get_if<double>(&idx)) {
      const auto& items = (*arr)->items;
      if (!is_array_index(*d) || *d >= static_cast<double>(items.size())) return Undefined{};
      return items[static_cast<std::size_t>(*d)];
    }
  }
  if (auto s = std::get_if<StringRef>(&obj)) {
    if (auto d = std::get_if<double>(&idx)) {
      if (!is_array_index(*d) || *d >= (*s)->length) return Undefined{};
      auto content = string_content(**s);
      return constant_string(std::u16string(1, content[static_cast<std::size_t>(*d)]));
    }
  }
  return get_property(obj, to_utf8(to_string_content(idx)), e);
}

Value Interpreter::eval_call(const Expr& e) {
  const Expr& callee = *e.children[0];
  auto eval_args = [&] {
    std::vector<Value> args;
    for (std::size_t i = 1; i < e.children.size(); ++i) args.push_back(eval(*e.children[i]));
    return args;
  };

  if (callee.kind == ExprKind::Identifier) {
    if (Value* v = lookup(callee.name)) {
      auto fn = std::get_if<FunctionRef>(v);
      if (!fn) throw ScriptError(callee.span, "'" + callee.name + "' is not a function");
      const Stmt* decl = fn->decl;
      return call_function(*decl, eval_args(), e);
    }
    if (builtin_names().count(callee.name)) {
      auto args = eval_args();
      return call_builtin(callee.name, args, e);
    }
    throw ScriptError(callee.span, "'" + callee.name + "' is not defined");
  }

  if (callee.kind == ExprKind::Member) {
    Value target = eval(*callee.children[0]);
    if (auto obj = std::get_if<ObjectRef>(&target)) {
      Value* prop = find_prop((*obj)->props, callee.name);
      auto fn = prop ? std::get_if<FunctionRef>(prop) : nullptr;
      if (!fn) throw ScriptError(callee.span, "'" + callee.name + "' is not a function");
      const Stmt* decl = fn->decl;
      return call_function(*decl, eval_args(), e);
    }
    auto args = eval_args();
    return call_method(target, callee.name, args, e);
  }

  Value v = eval(callee);
  auto fn = std::get_if<FunctionRef>(&v);
  if (!fn) throw ScriptError(callee.span, "value is not a function");
  return call_function(*fn->decl, eval_args(), e);
}

Value Interpreter::call_function(const Stmt& fn, std::vector<Value> args, const Expr& at) {
  if (static_cast<int>(frames_.size()) >= options_.max_call_depth) {
    throw ScriptError(at.span, "maximum call depth exceeded");
  }
  Frame frame;
  frame.function = &fn;
  for (const auto& name : fn.locals) frame.locals.emplace(name, Undefined{});
  for (std::size_t i = 0; i < fn.params.size() && i < args.size(); ++i) {
    frame.locals[fn.params[i]] = std::move(args[i]);
  }
  args.clear();
  frames_.push_back(std::move(frame));
  struct Pop {
    std::deque<Frame>& frames;
    ~Pop() { frames.pop_back(); }
  } pop{frames_};
  Flow f = exec_list(fn.block);
  if (f == Flow::Break || f == Flow::Continue) throw ScriptError(at.span, "break or continue outside a loop");
  return std::move(frames_.back().return_value);
}

Value Interpreter::call_builtin(const std::string& name, std::vector<Value>& args, const Expr& at) {
  auto arg = [&](std::size_t i) -> const Value& {
    static const Value undefined = Undefined{};
    return i < args.size() ? args[i] : undefined;
  };
  auto element_arg = [&](std::size_t i) -> ElementRef {
    auto el = std::get_if<ElementRef>(&arg(i));
    if (!el) throw ScriptError(at.span, name + " expects an element, got " + type_name(arg(i)));
    return *el;
  };
  auto string_arg = [&](std::size_t i) -> StringRef {
    auto s = std::get_if<StringRef>(&arg(i));
    if (!s) throw ScriptError(at.span, name + " expects a string, got " + type_name(arg(i)));
    return *s;
  };

  if (name == "unescape") {
    auto decoded = unescape_text(string_content(*string_arg(0)));
    return heap_string(encode_utf16le(decoded), AllocatorKind::System);
  }
  if (name == "domCreate") return create_element(to_utf8(string_content(*string_arg(0))));
  if (name == "domClear") {
    ElementRef container = element_arg(0);
    auto kids = std::move(container->children);
    container->children.clear();
    for (auto& k : kids) {
      k->parent = nullptr;
      free_element(*k);
    }
    return Undefined{};
  }
  if (name == "collectGarbage") {
    collect_garbage();
    return Undefined{};
  }
  if (name == "plantUAF") {
    ElementRef el = element_arg(0);
    model_.free(AllocatorKind::Custom, el->record);
    el->live = false;
    return Undefined{};
  }
  if (name == "triggerVirtualCall") {
    ElementRef el = element_arg(0);
    model_.set_pc(Address{model_.read_u32(el->record)});
    return Undefined{};
  }
  if (name == "pivotGadget") {
    double a = to_number(arg(0), at);
    if (!(a >= 0 && a <= 0xffffffffu)) throw ScriptError(at.span, "pivotGadget expects a 32-bit address");
    Address sp{static_cast<std::uint32_t>(a)};
    model_.set_sp(sp);
    model_.set_pc(Address{model_.read_u32(sp)});
    return Undefined{};
  }
  if (name == "setInterval" || name == "setTimeout") {
    auto fn = std::get_if<FunctionRef>(&arg(0));
    if (!fn) throw ScriptError(at.span, name + " expects a function");
    const Stmt* decl = fn->decl;
    call_function(*decl, {}, at);
    return static_cast<double>(next_timer_id_++);
  }
  // clearInterval / clearTimeout: callbacks already ran.
  return Undefined{};
}

Value Interpreter::call_method(const Value& target, const std::string& method, std::vector<Value>& args,
                               const Expr& at) {
  auto arg = [&](std::size_t i) -> Value { return i < args.size() ? args[i] : Value{Undefined{}}; };

  if (auto s = std::get_if<StringRef>(&target)) {
    const StringObj& str = **s;
    const auto len = static_cast<std::int64_t>(str.length);
    if (method == "substring") {
      auto clamp = [&](const Value& v, std::int64_t fallback) {
        if (std::holds_alternative<Undefined>(v)) return fallback;
        return std::clamp<std::int64_t>(to_integer(to_number(v, at)), 0, len);
      };
      std::int64_t a = clamp(arg(0), 0);
      std::int64_t b = clamp(arg(1), len);
      if (a > b) std::swap(a, b);
      std::vector<std::uint8_t> bytes;
      if (b > a) {
        if (str.heap) {
          bytes = model_.read_bytes(Address{static_cast<std::uint32_t>(str.addr.value + 2 * a)},
                                    static_cast<std::uint32_t>(2 * (b - a)));
        } else {
          bytes = encode_utf16le(std::u16string_view(str.constant).substr(a, b - a));
        }
      }
      return heap_string(bytes, AllocatorKind::System);
    }
    if (method == "charCodeAt") {
      std::int64_t i = to_integer(to_number(arg(0), at));
      if (i < 0 || i >= len) return std::nan("");
      if (!str.heap) return static_cast<double>(str.constant[i]);
      auto b = model_.read_bytes(Address{static_cast<std::uint32_t>(str.addr.value + 2 * i)}, 2);
      return static_cast<double>(b[0] | (b[1] << 8));
    }
  } else if (auto a = std::get_if<ArrayRef>(&target)) {
    auto& items = (*a)->items;
    if (method == "push") {
      for (auto& v : args) items.push_back(std::move(v));
      if (items.size() > kMaxArrayLength) throw ScriptError(at.span, "array too long");
      return static_cast<double>(items.size());
    }
    if (method == "pop") {
      if (items.empty()) return Undefined{};
      Value v = std::move(items.back());
      items.pop_back();
      return v;
    }
  } else if (auto el = std::get_if<ElementRef>(&target)) {
    if (method == "appendChild" || method == "removeChild") {
      auto child = args.empty() ? nullptr : std::get_if<ElementRef>(&args[0]);
      if (!child) throw ScriptError(at.span, method + " expects an element");
      ElementRef c = *child;
      if (c.get() == el->get()) throw ScriptError(at.span, "cannot append an element to itself");
      if (c->parent) {
        auto& siblings = c->parent->children;
        siblings.erase(std::remove(siblings.begin(), siblings.end(), c), siblings.end());
        c->parent = nullptr;
      }
      if (method == "appendChild") {
        c->parent = el->get();
        (*el)->children.push_back(c);
      }
      return c;
    }
  } else if (target.index() <= 1) {
    throw ScriptError(at.span, "cannot call '" + method + "' on " + type_name(target));
  }
  throw ScriptError(at.span, "'" + method + "' is not a function");
}

// ---- properties and variables ----

Value* Interpreter::lookup(const std::string& name) {
  if (!frames_.empty()) {
    auto& locals = frames_.back().locals;
    if (auto it = locals.find(name); it != locals.end()) return &it->second;
  }
  auto it = globals_.find(name);
  return it == globals_.end() ? nullptr : &it->second;
}

Value& Interpreter::slot(const std::string& name) {
  if (Value* v = lookup(name)) return *v;
  return globals_[name];
}

Value Interpreter::get_property(const Value& target, const std::string& key, const Expr& at) {
  switch (target.index()) {
    case 0:
    case 1: throw ScriptError(at.span, "cannot read property '" + key + "' of " + type_name(target));
    case 4:
      if (key == "length") return static_cast<double>(std::get<StringRef>(target)->length);
      return Undefined{};
    case 5:
      if (key == "length") return static_cast<double>(std::get<ArrayRef>(target)->items.size());
      return Undefined{};
    case 6: {
      Value* v = find_prop(std::get<ObjectRef>(target)->props, key);
      return v ? *v : Value{Undefined{}};
    }
    case 8: {
      const auto& el = std::get<ElementRef>(target);
      if (key == "firstChild") return el->children.empty() ? Value{Null{}} : Value{el->children.front()};
      if (key == "lastChild") return el->children.empty() ? Value{Null{}} : Value{el->children.back()};
      if (key == "parentNode") return el->parent ? Value{el->parent->shared_from_this()} : Value{Null{}};
      if (key == "tagName") return constant_string(ascii_to_u16(el->tag));
      Value* v = find_prop(el->props, key);
      return v ? *v : Value{Undefined{}};
    }
    default: return Undefined{};
  }
}

void Interpreter::set_property(const Value& target, const std::string& key, Value value, const Expr& at) {
  if (auto obj = std::get_if<ObjectRef>(&target)) {
    put_prop((*obj)->props, key, std::move(value));
    return;
  }
  if (auto el = std::get_if<ElementRef>(&target)) {
    // The element keeps its own copy of string data, on the custom allocator.
    if (auto s = std::get_if<StringRef>(&value); s && (*s)->length > 0) {
      StringRef copy = heap_string(string_bytes(**s), AllocatorKind::Custom);
      put_prop((*el)->props, key, std::move(copy));
      return;
    }
    put_prop((*el)->props, key, std::move(value));
    return;
  }
  if (auto arr = std::get_if<ArrayRef>(&target)) {
    double d = parse_number(ascii_to_u16(key));
    if (is_array_index(d) && !key.empty()) {
      auto& items = (*arr)->items;
      auto i = static_cast<std::size_t>(d);
      if (i >= items.size()) items.resize(i + 1);
      items[i] = std::move(value);
      return;
    }
  }
  throw ScriptError(at.span, "cannot set property '" + key + "' of " + type_name(target));
}

// ---- strings ----

StringRef Interpreter::constant_string(std::u16string text) {
  auto s = std::make_shared<StringObj>();
  s->length = static_cast<std::uint32_t>(text.size());
  s->constant = std::move(text);
  return s;
}

StringRef Interpreter::heap_string(const std::vector<std::uint8_t>& bytes, AllocatorKind allocator) {
  if (bytes.empty()) return constant_string(u"");
  if (bytes.size() > 0xfffffff0u) throw OutOfMemory("string too long");
  const auto size = static_cast<std::uint32_t>(bytes.size());
  Address addr = model_.allocate(allocator, size);
  model_.write_bytes(addr, bytes);
  auto s = std::make_shared<StringObj>();
  s->length = size / 2;
  s->heap = true;
  s->addr = addr;
  s->owner = model_.live_record(addr)->allocator;
  s->link = link_;
  link_->live_string_bytes += size;
  return s;
}

std::vector<std::uint8_t> Interpreter::string_bytes(const StringObj& s) {
  if (!s.heap) return encode_utf16le(s.constant);
  return model_.read_bytes(s.addr, s.byte_size());
}

std::u16string Interpreter::string_content(const StringObj& s) {
  if (!s.heap) return s.constant;
  return decode_utf16le(string_bytes(s));
}

std::u16string Interpreter::to_string_content(const Value& v) {
  switch (v.index()) {
    case 0: return u"undefined";
    case 1: return u"null";
    case 2: return std::get<bool>(v) ? u"true" : u"false";
    case 3: return ascii_to_u16(format_number(std::get<double>(v)));
    case 4: return string_content(*std::get<StringRef>(v));
    case 5: {
      std::u16string out;
      const auto& items = std::get<ArrayRef>(v)->items;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += u",";
        if (items[i].index() > 1) out += to_string_content(items[i]);
      }
      return out;
    }
    case 6: return u"[object Object]";
    case 7: return u"function";
    default: return u"[object Element]";
  }
}

StringRef Interpreter::concat(const Value& lhs, const Value& rhs) {
  auto bytes_of = [&](const Value& v) {
    if (auto s = std::get_if<StringRef>(&v)) return string_bytes(**s);
    return encode_utf16le(to_string_content(v));
  };
  std::vector<std::uint8_t> bytes = bytes_of(lhs);
  std::vector<std::uint8_t> tail = bytes_of(rhs);
  bytes.insert(bytes.end(), tail.begin(), tail.end());
  return heap_string(bytes, AllocatorKind::System);
}

// ---- DOM analog ----

ElementRef Interpreter::create_element(const std::string& tag) {
  auto [it, inserted] = tag_ids_.emplace(tag, static_cast<int>(tag_ids_.size()));
  const RegionSpec& code = model_.layout().code.front();
  const std::uint32_t offset = (0x1000u + 0x10u * static_cast<std::uint32_t>(it->second)) % code.size;
  const std::uint32_t vtable = code.base.value + (offset & ~3u);

  Address record = model_.allocate(AllocatorKind::Custom, options_.element_size);
  std::uint8_t word[4] = {static_cast<std::uint8_t>(vtable), static_cast<std::uint8_t>(vtable >> 8),
                          static_cast<std::uint8_t>(vtable >> 16), static_cast<std::uint8_t>(vtable >> 24)};
  model_.write_bytes(record, std::span<const std::uint8_t>(word, std::min<std::uint32_t>(4, options_.element_size)));

  auto el = std::make_shared<Element>();
  el->tag = tag;
  el->record = record;
  elements_.push_back(el);
  return el;
}

void Interpreter::free_element(Element& el) {
  model_.free(AllocatorKind::Custom, el.record);
  el.live = false;
  for (auto& k : el.children) k->parent = nullptr;
  auto kids = std::move(el.children);
  el.children.clear();
  release_props(el);
}

void Interpreter::release_props(Element& el) {
  auto props = std::move(el.props);
  el.props.clear();
}

void Interpreter::collect_garbage() {
  auto garbage = [](const ElementRef& el) { return el.use_count() == 1 && el->parent == nullptr; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (elements_[i]->live && garbage(elements_[i])) {
        free_element(*elements_[i]);
        changed = true;
      }
    }
    std::erase_if(elements_, [&](const ElementRef& el) { return !el->live && garbage(el); });
  }
}

// ---- conversions ----

bool Interpreter::truthy(const Value& v) {
  switch (v.index()) {
    case 0:
    case 1: return false;
    case 2: return std::get<bool>(v);
    case 3: {
      double d = std::get<double>(v);
      return d != 0 && !std::isnan(d);
    }
    case 4: return std::get<StringRef>(v)->length > 0;
    default: return true;
  }
}

double Interpreter::to_number(const Value& v, const Expr&) {
  switch (v.index()) {
    case 1: return 0;
    case 2: return std::get<bool>(v) ? 1 : 0;
    case 3: return std::get<double>(v);
    case 4: return parse_number(string_content(*std::get<StringRef>(v)));
    default: return std::nan("");
  }
}

bool Interpreter::strict_equals(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  switch (a.index()) {
    case 0:
    case 1: return true;
    case 2: return std::get<bool>(a) == std::get<bool>(b);
    case 3: return std::get<double>(a) == std::get<double>(b);
    case 4: {
      const auto& x = std::get<StringRef>(a);
      const auto& y = std::get<StringRef>(b);
      return x == y || (x->length == y->length && string_content(*x) == string_content(*y));
    }
    default: return a == b;
  }
}

std::uint64_t Interpreter::reachable_string_bytes() const {
  std::unordered_set<const void*> seen;
  std::uint64_t total = 0;
  std::function<void(const Value&)> visit = [&](const Value& v) {
    if (auto s = std::get_if<StringRef>(&v)) {
      if ((*s)->heap && seen.insert(s->get()).second) total += (*s)->byte_size();
    } else if (auto a = std::get_if<ArrayRef>(&v)) {
      if (seen.insert(a->get()).second) {
        for (const auto& x : (*a)->items) visit(x);
      }
    } else if (auto o = std::get_if<ObjectRef>(&v)) {
      if (seen.insert(o->get()).second) {
        for (const auto& [k, x] : (*o)->props) visit(x);
      }
    } else if (auto el = std::get_if<ElementRef>(&v)) {
      if (seen.insert(el->get()).second) {
        for (const auto& [k, x] : (*el)->props) visit(x);
        for (const auto& c : (*el)->children) visit(c);
      }
    }
  };
  for (const auto& [name, v] : globals_) visit(v);
  for (const auto& f : frames_) {
    for (const auto& [name, v] : f.locals) visit(v);
    visit(f.return_value);
  }
  for (const auto& el : elements_) visit(el);
  return total;
}

}  // namespace wmr
