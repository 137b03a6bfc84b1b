#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motionstyle {

/// Failure categories raised by the library. Each maps onto one CLI exit code
/// (see exit_code()).
enum class ErrorCode {
  // motion-data
  DegenerateRotation,
  NotARotation,
  MissingMirrorMap,
  UpsamplingUnsupported,
  EmptyCorpus,
  TooShort,
  BadMagic,
  ShapeMismatch,
  UnsupportedVersion,
  IoError,
  // models
  NotNormalized,
  VariantMismatch,
  LabelRequired,
  LabelForbidden,
  ModeMismatch,
  UnsupervisedModel,
  SupervisedModel,
  MissingCodec,
  DimMismatch,
  DatasetTooSmall,
  NonFiniteLoss,
  Diverged,
  // metrics
  DegenerateFeatures,
  LengthMismatch,
  TooFew,
  OutOfRange,
  // cli
  Usage,
};

std::string_view to_string(ErrorCode code);

/// 0 ok, 2 usage, 3 data error, 4 mode mismatch, 5 diverged.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace motionstyle
