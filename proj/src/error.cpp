#include "qfh/error.hpp"

namespace qfh {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::numerical: return "numerical failure";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

}  // namespace qfh
