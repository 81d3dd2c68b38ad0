#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "address.hpp"
#include "events.hpp"

namespace wmr {

class MemoryModel;
struct Stmt;

// Shared between the interpreter and every heap string it creates. The
// interpreter clears `model` on teardown so late destructors stop emitting.
struct HeapLink {
  MemoryModel* model = nullptr;
  std::uint64_t live_string_bytes = 0;
};

/// Immutable script string. Literals stay host-side ("constant"); every
/// computed string lives in simulated memory and is freed through its owning
/// allocator when the last script reference drops.
struct StringObj {
  std::uint32_t length = 0;  // UTF-16 code units
  std::u16string constant;   // content when !heap
  bool heap = false;
  Address addr;
  AllocatorKind owner = AllocatorKind::System;
  std::shared_ptr<HeapLink> link;

  std::uint32_t byte_size() const { return length * 2; }

  StringObj() = default;
  StringObj(const StringObj&) = delete;
  StringObj& operator=(const StringObj&) = delete;
  ~StringObj();
};

struct ArrayObj;
struct ObjectObj;
struct Element;

struct Undefined {
  bool operator==(const Undefined&) const = default;
};
struct Null {
  bool operator==(const Null&) const = default;
};
struct FunctionRef {
  const Stmt* decl = nullptr;
  bool operator==(const FunctionRef&) const = default;
};

using StringRef = std::shared_ptr<StringObj>;
using ArrayRef = std::shared_ptr<ArrayObj>;
using ObjectRef = std::shared_ptr<ObjectObj>;
using ElementRef = std::shared_ptr<Element>;

using Value = std::variant<Undefined, Null, bool, double, StringRef, ArrayRef, ObjectRef, FunctionRef, ElementRef>;

struct ArrayObj {
  std::vector<Value> items;
};

struct ObjectObj {
  std::vector<std::pair<std::string, Value>> props;  // insertion order
};

/// DOM-analog element: a fixed-size record on the custom allocator.
struct Element : std::enable_shared_from_this<Element> {
  std::string tag;
  Address record;
  bool live = true;
  Element* parent = nullptr;
  std::vector<ElementRef> children;
  std::vector<std::pair<std::string, Value>> props;
};

}  // namespace wmr
