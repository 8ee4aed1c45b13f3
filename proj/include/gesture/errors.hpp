#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gesture {

// Errors fall in two families: bad input (files, streams, arguments) and
// failures of a numerical computation. The CLI maps them to exit codes 2 and 3.
enum class ErrorFamily { input, computation };

class Error : public std::runtime_error {
public:
  Error(ErrorFamily family, const std::string& what) : std::runtime_error(what), family_(family) {}
  ErrorFamily family() const noexcept { return family_; }

private:
  ErrorFamily family_;
};

class InputError : public Error {
public:
  explicit InputError(const std::string& what) : Error(ErrorFamily::input, what) {}
};

class ComputationError : public Error {
public:
  explicit ComputationError(const std::string& what) : Error(ErrorFamily::computation, what) {}
};

// skeleton_io

class MalformedStream : public InputError {
public:
  explicit MalformedStream(std::size_t token_count)
      : InputError("malformed skeleton stream: " + std::to_string(token_count) +
                   " tokens is not a multiple of 60"),
        token_count_(token_count) {}
  std::size_t token_count() const noexcept { return token_count_; }

private:
  std::size_t token_count_;
};

class BadToken : public InputError {
public:
  BadToken(std::size_t position, const std::string& token)
      : InputError("bad token at position " + std::to_string(position) + ": '" + token + "'"),
        position_(position) {}
  /// 1-based token index within the stream.
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

class EmptyStream : public InputError {
public:
  EmptyStream() : InputError("skeleton stream contains no frames") {}
};

// features

class DegenerateDepth : public ComputationError {
public:
  DegenerateDepth(std::size_t triangle, double mean_depth)
      : ComputationError("non-positive mean depth " + std::to_string(mean_depth) + " for triangle " +
                         std::to_string(triangle)),
        triangle_(triangle) {}
  /// 1-based triangle index, 0 when the distance was computed outside a frame.
  std::size_t triangle() const noexcept { return triangle_; }

private:
  std::size_t triangle_;
};

class DegenerateDirection : public ComputationError {
public:
  explicit DegenerateDirection(std::size_t mean_joint)
      : ComputationError("zero-length vector for mean joint J" + std::to_string(mean_joint)),
        mean_joint_(mean_joint) {}
  /// 1-based mean-joint index, 0 for a bare vector.
  std::size_t mean_joint() const noexcept { return mean_joint_; }

private:
  std::size_t mean_joint_;
};

/// Wraps a per-frame feature error with the 1-based frame index.
class FrameError : public ComputationError {
public:
  FrameError(std::size_t frame, const std::string& inner)
      : ComputationError("frame " + std::to_string(frame) + ": " + inner), frame_(frame) {}
  std::size_t frame() const noexcept { return frame_; }

private:
  std::size_t frame_;
};

// classifiers

class DimensionMismatch : public ComputationError {
public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : ComputationError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                         std::to_string(actual)) {}
};

class InsufficientClasses : public ComputationError {
public:
  explicit InsufficientClasses(std::size_t classes)
      : ComputationError("training needs at least 2 classes, got " + std::to_string(classes)) {}
};

class TrainingDegenerate : public ComputationError {
public:
  using ComputationError::ComputationError;
};

class ConvergenceFailure : public ComputationError {
public:
  using ComputationError::ComputationError;
};

class InvalidBootstrap : public ComputationError {
public:
  using ComputationError::ComputationError;
};

class ModelFormatError : public InputError {
public:
  using InputError::InputError;
};

// harness

class StratifyError : public ComputationError {
public:
  using ComputationError::ComputationError;
};

class DepthRangeViolation : public ComputationError {
public:
  using ComputationError::ComputationError;
};

class InvalidArgument : public InputError {
public:
  using InputError::InputError;
};

}  // namespace gesture
