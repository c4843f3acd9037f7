#include "hiht/error.hpp"

namespace hiht {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidLabel: return "invalid label";
    case ErrorKind::DegenerateDataset: return "degenerate dataset";
    case ErrorKind::Stratification: return "stratification error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Refusal: return "refused";
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace hiht
