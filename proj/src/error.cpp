#include "nkg/error.hpp"

namespace nkg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::DegenerateBlock: return "DegenerateBlock";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoBlocks: return "NoBlocks";
    case ErrorKind::NonPositiveDenominator: return "NonPositiveDenominator";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace nkg
