#pragma once

#include <stdexcept>
#include <string>

namespace wmr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called out of order (e.g. capturing baselines twice).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OutOfMemory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wmr
