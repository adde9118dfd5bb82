#pragma once

#include <stdexcept>
#include <string>

namespace levyq {

/// Failure categories raised by the library. The CLI maps `parse`,
/// `domain` and `degenerate_design` to the input-error exit code and
/// everything else to the numerical-failure exit code.
enum class Errc {
  domain,
  unsupported,
  divergence,
  no_solution,
  no_bracket,
  martingale_violation,
  incompatible_method,
  degenerate_design,
  empty_grid,
  guard_dominated,
  parse,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline bool is_input_error(Errc code) {
  return code == Errc::parse || code == Errc::domain ||
         code == Errc::degenerate_design;
}

const char* to_string(Errc code);

}  // namespace levyq
