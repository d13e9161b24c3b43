#pragma once

#include <stdexcept>
#include <string>

namespace sememe {

// Failure categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  kInvalidArgument,  // contract violation by the caller
  kIo,               // unreadable / malformed files
  kDegenerate,       // degenerate math input (rank deficiency, too few pairs)
  kNotFound,         // query miss (unknown word / token)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); }
[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return 2;
    case ErrorKind::kDegenerate: return 3;
    case ErrorKind::kNotFound: return 4;
    case ErrorKind::kInvalidArgument: return 1;
  }
  return 1;
}

}  // namespace sememe
