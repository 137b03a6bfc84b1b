#include "motionstyle/error.hpp"

namespace motionstyle {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateRotation: return "DegenerateRotation";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::MissingMirrorMap: return "MissingMirrorMap";
    case ErrorCode::UpsamplingUnsupported: return "UpsamplingUnsupported";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::LabelRequired: return "LabelRequired";
    case ErrorCode::LabelForbidden: return "LabelForbidden";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::UnsupervisedModel: return "UnsupervisedModel";
    case ErrorCode::SupervisedModel: return "SupervisedModel";
    case ErrorCode::MissingCodec: return "MissingCodec";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::DatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::DegenerateFeatures: return "DegenerateFeatures";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage:
    case ErrorCode::OutOfRange:
      return 2;
    case ErrorCode::LabelRequired:
    case ErrorCode::LabelForbidden:
    case ErrorCode::ModeMismatch:
    case ErrorCode::UnsupervisedModel:
    case ErrorCode::SupervisedModel:
    case ErrorCode::VariantMismatch:
      return 4;
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::Diverged:
      return 5;
    default:
      return 3;
  }
}

}  // namespace motionstyle
