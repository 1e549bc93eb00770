#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace muselet {

enum class ErrorCode {
  FileNotFound,
  MalformedContainer,
  MalformedXml,
  UnsupportedFormat,
  EmptyScore,
  UnsupportedAlteration,
  MixedSchemes,
  EmptyCorpus,
  MalformedCsv,
  NonFiniteElbo,
  TopicOutOfRange,
  InvalidArgument,
  InvalidWeights,
  TooFewSamples,
  TooFewClasses,
  EmptyTrainingSet,
  SolverDidNotConverge,
  DegenerateCovariance,
  SingularWithinScatter,
  NoIngestibleFiles,
  VocabularyMismatch,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace muselet
