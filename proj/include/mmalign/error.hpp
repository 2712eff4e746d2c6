#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mmalign {

// Categories map one-to-one onto CLI exit codes.
enum class ErrorKind { input = 1, invariant = 2, internal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Malformed or missing input (bad file, schema violation, parse failure).
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

/// Subtitle parse failure that can be pinned to a line.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A data-model invariant does not hold (overlapping blocks, bad span, ...).
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

/// Non-fatal problems collected while processing (skipped cues, ignored
/// fields, missing modalities). Callers decide whether to log them.
struct Warnings {
  std::vector<std::string> messages;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  std::size_t count() const noexcept { return messages.size(); }
  bool empty() const noexcept { return messages.empty(); }
};

}  // namespace mmalign
