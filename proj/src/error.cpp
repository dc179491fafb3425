#include "floodscout/error.hpp"

namespace floodscout {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::io: return "io_error";
  }
  return "error";
}

}  // namespace floodscout
