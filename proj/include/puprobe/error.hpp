#pragma once

#include <stdexcept>
#include <string>

namespace puprobe {

enum class ErrorKind {
  InvalidModel,
  SingularPoint,
  Domain,
  DegenerateGeometry,
  Sampling,
  NoSignal,
  BadFit,
  SingularMixing,
  Shape,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; the kind tells callers (and the CLI
/// exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace puprobe
