#pragma once

#include <stdexcept>
#include <string>

namespace hiht {

enum class ErrorKind {
  InvalidLabel,
  DegenerateDataset,
  Stratification,
  Shape,
  Parameter,
  Config,
  Divergence,
  Parse,
  Refusal,
  Usage,
  Io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind() when they
// need to distinguish (the CLI maps Usage to exit code 1, everything else to 2).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hiht
