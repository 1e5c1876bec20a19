#pragma once

#include <stdexcept>
#include <string>

namespace mts {

/// Base class for every domain error thrown by the library. The CLI maps any
/// Error to exit code 1; argument/usage problems are reported by the parser
/// and map to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, missing key, wrong value type).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Grid shape disagrees with the data (dims/values/spacing mismatch,
/// unsupported dimensionality, axis extent below 2).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A scalar value is NaN or infinite where a finite number is required.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is outside its documented range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A child branch interval escapes its parent interval where nesting is
/// required.
class NestingViolation : public Error {
 public:
  using Error::Error;
};

/// Local normalization hit a parent branch with zero persistence.
class ZeroPersistenceParent : public Error {
 public:
  using Error::Error;
};

/// An iterative optimization exhausted its iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// An operation that needs at least one branch received an empty tree.
class EmptyTree : public Error {
 public:
  using Error::Error;
};

/// Interpolation parameter outside [0, 1].
class InvalidAlpha : public Error {
 public:
  using Error::Error;
};

/// A matching does not cover the trees it is applied to (bad indices,
/// double assignment, branch left unaccounted for).
class MatchingMismatch : public Error {
 public:
  using Error::Error;
};

/// Weight vector invalid (negative entry, wrong length, all zero).
class WeightError : public Error {
 public:
  using Error::Error;
};

/// An ensemble operation received no members.
class EmptyEnsemble : public Error {
 public:
  using Error::Error;
};

/// Cluster count outside [1, ensemble size].
class InvalidK : public Error {
 public:
  using Error::Error;
};

/// Two sequences that must have equal length do not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// A kept-frame set for sequence reduction is invalid (missing endpoints,
/// out-of-range or duplicate indices).
class InvalidKeyFrames : public Error {
 public:
  using Error::Error;
};

}  // namespace mts
