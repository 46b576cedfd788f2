#include "crjet/errors.hpp"

namespace crjet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::rank: return "rank";
    case ErrorKind::retry_exhausted: return "retry_exhausted";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

}  // namespace crjet
