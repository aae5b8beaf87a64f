#include "edgevo/error.hpp"

namespace edgevo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AmbiguousLog: return "AmbiguousLog";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoObservations: return "NoObservations";
    case ErrorCode::DegenerateSystem: return "DegenerateSystem";
    case ErrorCode::DegenerateIntersection: return "DegenerateIntersection";
    case ErrorCode::NoParallax: return "NoParallax";
    case ErrorCode::SearchOutOfBounds: return "SearchOutOfBounds";
    case ErrorCode::DegenerateTriangulation: return "DegenerateTriangulation";
    case ErrorCode::InvalidVariance: return "InvalidVariance";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoConsensus: return "NoConsensus";
    case ErrorCode::EmptyView: return "EmptyView";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::TrackingFailure: return "TrackingFailure";
  }
  return "Unknown";
}

}  // namespace edgevo
