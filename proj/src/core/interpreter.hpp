#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ast.hpp"
#include "events.hpp"
#include "memory_model.hpp"
#include "values.hpp"

namespace wmr {

enum class RunStatus { Terminated, TimedOut, ScriptError, Aborted };

std::string_view to_string(RunStatus status);
RunStatus run_status_from_string(std::string_view text);

struct RunOutcome {
  RunStatus status = RunStatus::Terminated;
  std::string reason;   // empty when Terminated
  SourceSpan location;  // script error location, if any
  std::uint64_t event_count = 0;
};

struct InterpreterOptions {
  std::uint32_t element_size = 0x58;
  int max_call_depth = 200;
};

class ScriptError : public std::runtime_error {
 public:
  ScriptError(SourceSpan span, const std::string& message)
      : std::runtime_error(message), span_(span) {}
  SourceSpan span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Tree-walking interpreter for `.wms` scripts.
///
/// Every executed statement is bracketed by StmtBegin/StmtEnd events (marker
/// statements and function declarations excepted); memory side effects go
/// through the MemoryModel, which shares the same event bus.
class Interpreter {
 public:
  Interpreter(const Script& script, MemoryModel& model, EventBus& bus, InterpreterOptions options = {});
  ~Interpreter();

  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  RunOutcome run();

  // Bytes of heap strings currently alive, by allocation bookkeeping.
  std::uint64_t live_string_bytes() const { return link_->live_string_bytes; }
  // Same quantity computed by walking every value reachable from globals and the DOM.
  std::uint64_t reachable_string_bytes() const;

  const Value* global(const std::string& name) const;

 private:
  enum class Flow { Normal, Break, Continue, Return };

  struct Frame {
    const Stmt* function = nullptr;
    std::unordered_map<std::string, Value> locals;
    Value return_value;
  };

  Flow exec(const Stmt& s);
  Flow exec_inner(const Stmt& s);
  Flow exec_list(const std::vector<StmtPtr>& list);
  void exec_marker(const Stmt& s);

  Value eval(const Expr& e);
  Value eval_pure(const Expr& e);
  Value eval_binary(const std::string& op, const Value& lhs, const Value& rhs, const Expr& at);
  Value eval_assign(const Expr& e);
  Value eval_update(const Expr& e);
  Value eval_call(const Expr& e);
  Value eval_member(const Expr& e);
  Value eval_index(const Expr& e);
  Value call_function(const Stmt& fn, std::vector<Value> args, const Expr& at);
  Value call_builtin(const std::string& name, std::vector<Value>& args, const Expr& at);
  Value call_method(const Value& target, const std::string& method, std::vector<Value>& args, const Expr& at);

  // Assignable location, resolved once so compound assignment evaluates the target a single time.
  struct LRef {
    bool is_var = false;
    std::string var;
    Value object;
    std::string key;
    bool numeric = false;
    double index = 0;
  };
  LRef resolve(const Expr& target);
  Value load(const LRef& ref, const Expr& at);
  void store(const LRef& ref, Value value, const Expr& at);

  Value* lookup(const std::string& name);
  Value& slot(const std::string& name);
  Value get_property(const Value& target, const std::string& key, const Expr& at);
  void set_property(const Value& target, const std::string& key, Value value, const Expr& at);

  // strings
  StringRef constant_string(std::u16string text);
  StringRef heap_string(const std::vector<std::uint8_t>& bytes, AllocatorKind allocator);
  std::vector<std::uint8_t> string_bytes(const StringObj& s);
  std::u16string string_content(const StringObj& s);
  std::u16string to_string_content(const Value& v);
  StringRef concat(const Value& lhs, const Value& rhs);

  // DOM analog
  ElementRef create_element(const std::string& tag);
  void free_element(Element& el);
  void release_props(Element& el);
  void collect_garbage();

  bool truthy(const Value& v);
  double to_number(const Value& v, const Expr& at);
  bool strict_equals(const Value& a, const Value& b);

  const Script& script_;
  MemoryModel& model_;
  EventBus& bus_;
  InterpreterOptions options_;
  std::shared_ptr<HeapLink> link_;

  std::unordered_map<std::string, Value> globals_;
  std::deque<Frame> frames_;
  std::vector<ElementRef> elements_;
  std::map<std::string, int> tag_ids_;
  std::unordered_map<const Expr*, StringRef> literal_cache_;
  std::set<std::string> marker_names_;
  std::map<std::string, int> marker_suffix_;
  int next_timer_id_ = 1;
};

}  // namespace wmr
