#include "teamflow/error.hpp"

namespace teamflow {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::UnknownEventType: return "UnknownEventType";
        case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorCode::UnfittedModel: return "UnfittedModel";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::UndefinedMetric: return "UndefinedMetric";
        case ErrorCode::MajorityExhausted: return "MajorityExhausted";
        case ErrorCode::WindowTooLong: return "WindowTooLong";
        case ErrorCode::SequenceTooShort: return "SequenceTooShort";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MissingUpstreamArtifact: return "MissingUpstreamArtifact";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidSpec:
        case ErrorCode::KTooLarge:
        case ErrorCode::WindowTooLong:
            return 2;
        case ErrorCode::Internal:
            return 4;
        default:
            return 3;
    }
}

}  // namespace teamflow
