#pragma once

#include <stdexcept>
#include <string>

namespace pose6d {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Precondition or argument violation (maps to CLI exit code 1).
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& msg) : Error(msg) {}
};

/// Projection requested for a point with non-positive camera z.
class BehindCameraError : public Error {
 public:
  explicit BehindCameraError(const std::string& msg) : Error(msg) {}
};

/// Pose fit called with fewer than three correspondences.
class InsufficientCorrespondencesError : public Error {
 public:
  explicit InsufficientCorrespondencesError(const std::string& msg) : Error(msg) {}
};

/// Cross-covariance rank too low for a unique rigid fit.
class DegenerateConfigurationError : public Error {
 public:
  explicit DegenerateConfigurationError(const std::string& msg) : Error(msg) {}
};

/// SIFT-FPS produced fewer salient candidates than requested keypoints.
class InsufficientSaliencyError : public Error {
 public:
  InsufficientSaliencyError(const std::string& msg, int candidate_count)
      : Error(msg), candidate_count(candidate_count) {}
  int candidate_count;
};

/// Pipeline configuration inconsistency (e.g. missing keypoint model for a class).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Malformed on-disk artifact. `line` is 1-based where applicable, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0) : Error(format(msg, line)), line(line) {}
  int line;

 private:
  static std::string format(const std::string& msg, int line) {
    if (line > 0) return "line " + std::to_string(line) + ": " + msg;
    return msg;
  }
};

/// Non-finite loss during optimization (maps to CLI exit code 2).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& msg, int step) : Error(msg), step(step) {}
  int step;
};

}  // namespace pose6d
