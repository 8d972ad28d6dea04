#pragma once

#include <stdexcept>
#include <string>

namespace ddos {

/// Broad failure categories. The CLI maps these onto exit codes.
enum class error_kind {
  parse,         // malformed input text
  config,        // invalid configuration or flag values
  contract,      // caller broke a precondition (arity, missing field, ...)
  training,      // model cannot be trained on the given data
  balancing,     // SMOTE preconditions not met
  empty_dataset, // nothing left to learn from
  degenerate,    // clustering collapsed; label mapping undefined
  numeric,       // singular systems, non-convergence
  io,            // missing or unwritable files
};

class error : public std::runtime_error {
 public:
  error(error_kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  error_kind kind() const noexcept { return kind_; }

 private:
  error_kind kind_;
};

class parse_error : public error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : error(error_kind::parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline error config_error(const std::string& what) {
  return {error_kind::config, what};
}
inline error contract_violation(const std::string& what) {
  return {error_kind::contract, what};
}
inline error training_error(const std::string& what) {
  return {error_kind::training, what};
}
inline error numeric_error(const std::string& what) {
  return {error_kind::numeric, what};
}

/// Process exit status for a failure: 3 for numeric trouble, 2 for anything
/// wrong with the data or configuration.
inline int exit_code_for(error_kind kind) noexcept {
  return kind == error_kind::numeric ? 3 : 2;
}

}  // namespace ddos
