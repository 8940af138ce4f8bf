#pragma once

#include <stdexcept>
#include <string>

namespace fbqo {

enum class ErrorCode {
  InvalidArgument,
  Config,
  PoleProximity,
  NoFlatBand,
  NoRootInGap,
  InsufficientData,
  Unsupported,
  SingularF,
  Internal,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }
  const char* name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace fbqo
