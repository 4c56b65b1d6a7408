#pragma once

#include <stdexcept>
#include <string>

namespace gdgm {

enum class ErrorKind {
  InvalidInput,
  Shape,
  InvalidConfig,
  DivergedTraining,
  UnknownProblem,
  StackUnderflow,
  DegenerateMetric,
  UnsupportedOracle,
  Checkpoint,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure in the library surfaces as this exception. The kind is
// stable and used by the CLI to emit a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a loss or gradient turns non-finite. `batch_index` is the
// offending point within the minibatch (or -1 when the aggregate is bad),
// `epoch` is filled in by the training loop.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, long batch_index, long epoch = -1)
      : Error(ErrorKind::DivergedTraining, what),
        batch_index_(batch_index),
        epoch_(epoch) {}

  long batch_index() const noexcept { return batch_index_; }
  long epoch() const noexcept { return epoch_; }

 private:
  long batch_index_;
  long epoch_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace gdgm
