#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgevo {

enum class ErrorCode {
  InvalidArgument,
  AmbiguousLog,
  BehindCamera,
  InvalidDepth,
  DegenerateLine,
  InvalidElement,
  TooLarge,
  NoObservations,
  DegenerateSystem,
  DegenerateIntersection,
  NoParallax,
  SearchOutOfBounds,
  DegenerateTriangulation,
  InvalidVariance,
  TooFewPoints,
  NoConsensus,
  EmptyView,
  InsufficientOverlap,
  ParseError,
  IoError,
  TrackingFailure,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every failure in the library
/// surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edgevo
