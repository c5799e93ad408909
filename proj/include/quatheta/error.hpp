#pragma once

#include <stdexcept>
#include <string>

namespace qth {

// All library failures carry a stable machine-readable code alongside the
// human message, so callers (CLI, bindings, tests) can branch on `code`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool ok, const std::string& code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}
