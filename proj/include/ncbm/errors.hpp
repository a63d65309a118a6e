#pragma once

#include <stdexcept>
#include <string>

namespace ncbm {

// Process exit codes used by the CLI; library errors map onto these.
enum class ErrorCode : int {
  Validation = 2,
  Numerical = 3,
  DegenerateComposition = 4,
  InputParse = 5,
  InfeasibleSweep = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parameter or input value outside its contract (OutOfRange, RowOverflow, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

// A solver failed to reach its residual tolerance within bounded work.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCode::Numerical, what) {}
};

// A composed cluster row has zero total mass and cannot be renormalized.
class DegenerateRowError : public Error {
 public:
  DegenerateRowError(int row, int fold_position, const std::string& what)
      : Error(ErrorCode::DegenerateComposition, what), row_(row), fold_position_(fold_position) {}
  int row() const { return row_; }
  // Index of the member whose fold step produced the zero row (0-based; for the
  // deferred variant this is the last member).
  int fold_position() const { return fold_position_; }

 private:
  int row_;
  int fold_position_;
};

// Malformed input file (log, member spec, config).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::InputParse, what) {}
};

// Sweep configuration leaves no feasible range for the swept parameter.
class InfeasibleSweepError : public Error {
 public:
  explicit InfeasibleSweepError(const std::string& what) : Error(ErrorCode::InfeasibleSweep, what) {}
};

// A correlated-function denominator 1-(pi_i+pi_j+pi_k) vanished.
class ZeroDenominatorError : public Error {
 public:
  explicit ZeroDenominatorError(const std::string& what) : Error(ErrorCode::Numerical, what) {}
};

}  // namespace ncbm
