#ifndef LAGSTAB_ERROR_HPP
#define LAGSTAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lagstab {

enum class ErrorCode {
  invalid_argument,
  config,
  domain,
  evaluation,
  immersion,
  precondition,
  unsupported,
  support,
  convergence,
};

const char* to_string(ErrorCode code);

// Every failure raised by the engine carries one of the codes above; the C
// layer maps them one-to-one onto lagstab_status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace lagstab

#endif
