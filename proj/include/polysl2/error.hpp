#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polysl2 {

enum class ErrorCode {
  invalid_argument,
  non_unitarizable,
  removable_singularity,
  hypergeometric_pole,
  non_convergence,
  no_root,
  domain_exit,
  step_underflow,
  config_parse,
  config_value,
  io,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::non_unitarizable: return "non_unitarizable";
    case ErrorCode::removable_singularity: return "removable_singularity";
    case ErrorCode::hypergeometric_pole: return "hypergeometric_pole";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::no_root: return "no_root";
    case ErrorCode::domain_exit: return "domain_exit";
    case ErrorCode::step_underflow: return "step_underflow";
    case ErrorCode::config_parse: return "config_parse";
    case ErrorCode::config_value: return "config_value";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace polysl2
