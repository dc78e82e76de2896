#include "psflow/error.hpp"

namespace psflow {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kNonConforming: return "non-conforming mesh";
    case ErrorCode::kDegenerate: return "degenerate triangle";
    case ErrorCode::kGeometry: return "geometry inconsistency";
    case ErrorCode::kSingularSystem: return "singular system";
    case ErrorCode::kSolverFailure: return "solver failure";
    case ErrorCode::kIncompatibleData: return "incompatible boundary data";
    case ErrorCode::kDisconnectedGraph: return "disconnected graph";
  }
  return "unknown error";
}

}  // namespace psflow
