#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace properdiv {

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on arguments (empty input, NaN, bad dimension...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A value falls outside a caller-supplied range, e.g. outside bin edges.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix is singular within tolerance where strict positive
/// definiteness is required.
class SingularCovariance : public Error {
 public:
  using Error::Error;
};

/// Requested operation/argument combination is not implemented.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// The datasets under comparison share no cells.
class NoCommonCells : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Malformed input file; carries the 1-based row number of the offence.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Input file contains no data rows.
class EmptyDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace properdiv
