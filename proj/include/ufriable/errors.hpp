#pragma once

#include <stdexcept>
#include <string>

namespace uf {

enum class ErrorCode {
  Domain = 1,
  Resource = 2,
  Precondition = 3,
  InvalidArgument = 4,
  Unsupported = 5,
};

// Base of every error raised by the library. The C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ErrorCode::Resource, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorCode::Precondition, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

class UnsupportedCase : public Error {
 public:
  explicit UnsupportedCase(const std::string& what) : Error(ErrorCode::Unsupported, what) {}
};

}  // namespace uf
