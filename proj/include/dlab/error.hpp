#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

enum class ErrorKind {
  invalid_input,     // precondition violated by the caller
  not_spd,           // metric not positive definite
  disconnected,      // graph has more than one component
  empty_set,         // empty source / sublevel / band
  not_grid,          // operation needs chart structure
  not_escaping,      // sequence does not escape the window
  no_stabilization,  // window too small for a limit to settle
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dlab
