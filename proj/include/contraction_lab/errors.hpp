#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace contraction_lab {

/// Base class for every error raised by the library.
class LabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public LabError {
 public:
  using LabError::LabError;
};

/// Input matrix is not square, empty, or contains NaN/Inf.
class MalformedOperator : public LabError {
 public:
  using LabError::LabError;
};

class EigensolverFailure : public LabError {
 public:
  using LabError::LabError;
};

/// A documented precondition of an operation does not hold. `reason`
/// distinguishes the failing precondition so callers can report it.
class PreconditionError : public LabError {
 public:
  enum class Reason {
    NotPositiveContraction,
    OrderingViolated,
    GapMissing,
    NoGapViolation,
    NotInComplement,
    OutOfScope,
    InvalidArgument,
  };

  PreconditionError(Reason reason, const std::string& what)
      : LabError(what), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

/// Chain construction rejected; `index` is the offending step (1-based) and
/// `coordinate` the offending eigencurve (0-based) or -1 when not applicable.
class ChainError : public LabError {
 public:
  ChainError(const std::string& what, int index, int coordinate = -1)
      : LabError(what), index_(index), coordinate_(coordinate) {}

  int index() const noexcept { return index_; }
  int coordinate() const noexcept { return coordinate_; }

 private:
  int index_;
  int coordinate_;
};

/// Chain spec validation failure carrying every violation found.
class SpecError : public LabError {
 public:
  explicit SpecError(std::vector<std::string> violations)
      : LabError(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// The certificate search observed a rank trajectory that does not descend
/// strictly at a gap violation. Indicates a generator or tolerance bug.
class RankDescentFailure : public LabError {
 public:
  RankDescentFailure(const std::string& what, int n) : LabError(what), n_(n) {}
  int n() const noexcept { return n_; }

 private:
  int n_;
};

}  // namespace contraction_lab
