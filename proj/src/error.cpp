#include "puprobe/error.hpp"

namespace puprobe {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::Sampling: return "sampling";
    case ErrorKind::NoSignal: return "no-signal";
    case ErrorKind::BadFit: return "bad-fit";
    case ErrorKind::SingularMixing: return "singular-mixing";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace puprobe
