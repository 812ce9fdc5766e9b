#pragma once

#include <stdexcept>
#include <string>

namespace tidx {

enum class ErrorKind {
  kInvalidArgument,  // caller violated a precondition
  kOutOfRange,       // page id, row or offset outside valid range
  kCorrupt,          // malformed serialized data or page
  kIo,               // backing file could not be opened/read/written
  kUnsupported,      // operation not available in this mode
  kCollision,        // hash-name collision detected during string sorting
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace tidx
