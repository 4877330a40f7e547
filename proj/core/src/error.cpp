#include "ek/error.hpp"

namespace ek {

const char* to_string(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::no_kink_found: return "no-kink-found";
    case ErrorKind::saddle_violation: return "saddle-violation";
    case ErrorKind::profile: return "profile";
    case ErrorKind::no_soliton: return "no-soliton";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::window: return "window";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::blowup: return "blowup";
    case ErrorKind::state: return "state";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, std::string(to_string(kind)) + ": " + msg);
}

bool is_validation_error(ErrorKind k) noexcept {
  return k == ErrorKind::configuration || k == ErrorKind::domain || k == ErrorKind::precondition;
}

}  // namespace ek
