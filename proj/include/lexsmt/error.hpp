#pragma once

#include <stdexcept>
#include <string>

namespace lexsmt {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source and target files disagree on line count.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class EncodingError : public Error {
 public:
  using Error::Error;
};

// A patch refers to sentence ids the corpus does not have.
class PatchError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (missing TAB, bad number, unknown tag...).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Caller broke a precondition of an operation.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// The experiment ladder broke its expected OOV trend.
class LadderError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexsmt
