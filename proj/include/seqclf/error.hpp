#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seqclf {

enum class ErrorKind {
  // input data
  MalformedFasta,
  InvalidResidue,
  DuplicateRecordId,
  MalformedMetadata,
  DuplicateMetadataKey,
  EmptyJoin,
  MissingLabel,
  ClassTooSmall,
  SequenceTooShort,
  LengthMismatch,
  EmptyCorpus,
  RaggedLengths,
  SingleClass,
  DegenerateLabels,
  DegenerateClass,
  EmptyTrainingSet,
  LabelOutOfRange,
  EmptyMatrix,
  EmptyRuns,
  MalformedFile,
  IoFailure,
  // configuration / preconditions
  InvalidConfig,
  InvalidDimension,
  InvalidGamma,
  DimensionMismatch,
  NotNormalized,
  // numerics
  NonFiniteLoss,
};

/// Process exit code family used by the command-line tool.
enum class ErrorCategory { Config = 2, Data = 3, Numerical = 4 };

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedFasta: return "MalformedFasta";
    case ErrorKind::InvalidResidue: return "InvalidResidue";
    case ErrorKind::DuplicateRecordId: return "DuplicateRecordId";
    case ErrorKind::MalformedMetadata: return "MalformedMetadata";
    case ErrorKind::DuplicateMetadataKey: return "DuplicateMetadataKey";
    case ErrorKind::EmptyJoin: return "EmptyJoin";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::SequenceTooShort: return "SequenceTooShort";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::RaggedLengths: return "RaggedLengths";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::DegenerateClass: return "DegenerateClass";
    case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::EmptyRuns: return "EmptyRuns";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::InvalidGamma: return "InvalidGamma";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::InvalidDimension:
    case ErrorKind::InvalidGamma:
      return ErrorCategory::Config;
    case ErrorKind::NonFiniteLoss:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

/// The single exception type thrown by the library. The message is prefixed
/// with the kind name so it reads well when printed as-is.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

  /// Same kind, message prefixed with `context`.
  Error with_context(const std::string& context) const { return Error(kind_, context + ": " + detail_); }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace seqclf
