#pragma once

#include <stdexcept>
#include <string>

namespace msaeval {

// Base of every error the library throws. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class DuplicateKeyError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class LabelParseError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class JoinError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace msaeval
