#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

// Root of every error raised by the library. Callers that only need to
// distinguish "bad input" from "resource limit" can catch the two
// intermediate classes below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or model that is malformed or violates a precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A search hit its configured work limit or the request is outside the
// supported fragment; the CLI maps these to exit code 3.
class LimitError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public DomainError {
 public:
  SyntaxError(int line, int col, std::string expected)
      : DomainError("syntax error at " + std::to_string(line) + ":" + std::to_string(col) +
                    ": expected " + expected),
        line_(line),
        col_(col),
        expected_(std::move(expected)) {}
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

#define SPECTRA_DOMAIN_ERROR(Name)   \
  class Name : public DomainError {  \
   public:                           \
    using DomainError::DomainError;  \
  };

#define SPECTRA_LIMIT_ERROR(Name)  \
  class Name : public LimitError { \
   public:                         \
    using LimitError::LimitError;  \
  };

SPECTRA_DOMAIN_ERROR(NamespaceClash)
SPECTRA_DOMAIN_ERROR(ReservedName)
SPECTRA_DOMAIN_ERROR(SignatureMismatch)
SPECTRA_DOMAIN_ERROR(NotAModel)
SPECTRA_DOMAIN_ERROR(NotASemigroup)
SPECTRA_DOMAIN_ERROR(UnsatisfiableTBox)
SPECTRA_DOMAIN_ERROR(UnsatisfiableKB)
SPECTRA_DOMAIN_ERROR(NoFiniteExtension)
SPECTRA_DOMAIN_ERROR(FunctionalRole)
SPECTRA_DOMAIN_ERROR(UnsupportedLogic)
SPECTRA_DOMAIN_ERROR(EmptyGenerators)
SPECTRA_DOMAIN_ERROR(ShapeViolation)
SPECTRA_DOMAIN_ERROR(PartialOrderViolation)
SPECTRA_DOMAIN_ERROR(InternalError)

SPECTRA_LIMIT_ERROR(BudgetExceeded)
SPECTRA_LIMIT_ERROR(UnsupportedFragment)

#undef SPECTRA_DOMAIN_ERROR
#undef SPECTRA_LIMIT_ERROR

}  // namespace spectra
