#include "surfzeta/error.hpp"

namespace surfzeta {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::config: return "config";
    case ErrorKind::validation: return "validation";
    case ErrorKind::construction: return "construction";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::domain: return "domain";
    case ErrorKind::resource: return "resource";
    case ErrorKind::pole_proximity: return "pole-proximity";
    case ErrorKind::degenerate_multiplier: return "degenerate-multiplier";
    case ErrorKind::completeness: return "completeness";
    case ErrorKind::bracketing: return "bracketing";
    case ErrorKind::staleness: return "staleness";
    case ErrorKind::corruption: return "corruption";
    case ErrorKind::consistency: return "consistency";
  }
  return "unknown";
}

}  // namespace surfzeta
