#pragma once

#include <stdexcept>
#include <string>

namespace rss {

enum class ErrorCode {
  kInvalidArgument = 1,  // bad parameters or configuration
  kData = 2,             // malformed or inconsistent input data
  kIo = 3,
  kInfeasible = 4,       // placement constraints could not be met
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &what) {
  throw Error(code, what);
}

inline void Require(bool cond, const std::string &what,
                    ErrorCode code = ErrorCode::kInvalidArgument) {
  if (!cond) throw Error(code, what);
}

}  // namespace rss
