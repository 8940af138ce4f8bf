#include "fbqo/error.hpp"

namespace fbqo {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NoFlatBand: return "NoFlatBand";
    case ErrorCode::NoRootInGap: return "NoRootInGap";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::SingularF: return "SingularF";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fbqo
