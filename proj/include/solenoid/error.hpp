#pragma once

#include <stdexcept>
#include <string>

namespace solenoid {

enum class ErrorKind {
  InvalidInput,   // non-finite data, bad arguments
  Shape,          // matrix / dimension mismatch
  Domain,         // point outside the fiber domain
  InvalidSpec,    // map violates a structural hypothesis
  Resource,       // enumeration budget exceeded
  InvalidWindow,  // regression window unusable
  Parse,          // config / command line
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::Resource: return "budget";
    case ErrorKind::InvalidWindow: return "invalid-window";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Process exit status used by the command line tool.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidWindow: return 2;
    case ErrorKind::Resource: return 3;
    case ErrorKind::InvalidSpec:
    case ErrorKind::Shape:
    case ErrorKind::Domain: return 4;
    case ErrorKind::Io: return 5;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace solenoid
