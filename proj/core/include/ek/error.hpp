#pragma once

#include <stdexcept>
#include <string>

namespace ek {

enum class ErrorKind {
  configuration,
  domain,
  numerical,
  no_kink_found,
  saddle_violation,
  profile,
  no_soliton,
  precondition,
  resolution,
  window,
  divergence,
  blowup,
  state,
};

const char* to_string(ErrorKind k) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

// Validation-type errors (bad input) vs. failures of a numerical procedure.
bool is_validation_error(ErrorKind k) noexcept;

}  // namespace ek
