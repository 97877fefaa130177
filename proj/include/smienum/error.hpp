#pragma once

#include <stdexcept>
#include <string>

namespace smienum {

// Error classes; each maps to a distinct C API status code and CLI exit code.
enum class ErrorCode {
  kInvalidArgument = 1,
  kParse = 2,
  kSizeLimit = 3,
  kLength = 4,
  kUnknownToken = 5,
  kIo = 6,
  kSchema = 7,
  kDuplicateId = 8,
  kNumeric = 9,
  kVocabMismatch = 10,
  kInvalidPermutation = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) { }

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string &message)
      : Error(ErrorCode::kParse,
              message + " at position " + std::to_string(position)),
        position_(position) { }

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace smienum
