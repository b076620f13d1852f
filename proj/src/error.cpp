#include "curie/error.hpp"

namespace curie {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
      return "configuration error";
    case ErrorKind::Input:
      return "input error";
    case ErrorKind::Coordinate:
      return "coordinate error";
    case ErrorKind::State:
      return "state error";
    case ErrorKind::Propagation:
      return "propagation error";
    case ErrorKind::Schema:
      return "schema error";
    case ErrorKind::Row:
      return "row error";
    case ErrorKind::Ordering:
      return "ordering error";
    case ErrorKind::Comparison:
      return "comparison error";
    case ErrorKind::Io:
      return "i/o error";
  }
  return "error";
}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace curie
