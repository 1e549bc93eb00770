#include "muselet/error.hpp"

namespace muselet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptyScore: return "EmptyScore";
    case ErrorCode::UnsupportedAlteration: return "UnsupportedAlteration";
    case ErrorCode::MixedSchemes: return "MixedSchemes";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::NonFiniteElbo: return "NonFiniteElbo";
    case ErrorCode::TopicOutOfRange: return "TopicOutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::SolverDidNotConverge: return "SolverDidNotConverge";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::SingularWithinScatter: return "SingularWithinScatter";
    case ErrorCode::NoIngestibleFiles: return "NoIngestibleFiles";
    case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace muselet
