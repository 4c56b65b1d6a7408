#include "gdgm/errors.hpp"

namespace gdgm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::InvalidConfig: return "config";
    case ErrorKind::DivergedTraining: return "diverged-training";
    case ErrorKind::UnknownProblem: return "unknown-problem";
    case ErrorKind::StackUnderflow: return "stack-underflow";
    case ErrorKind::DegenerateMetric: return "degenerate-metric";
    case ErrorKind::UnsupportedOracle: return "unsupported-oracle";
    case ErrorKind::Checkpoint: return "checkpoint";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace gdgm
