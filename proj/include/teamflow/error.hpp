#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace teamflow {

enum class ErrorCode {
    // ingestion
    MalformedRecord,
    UnknownEventType,
    InvalidTimestamp,
    IoFailure,
    // bot detection
    EmptyHistory,
    DegenerateLabels,
    NonFiniteFeature,
    UnfittedModel,
    KTooLarge,
    UndefinedMetric,
    // matching / motifs / stats
    MajorityExhausted,
    WindowTooLong,
    SequenceTooShort,
    EmptySample,
    EmptyCorpus,
    // synth / pipeline
    InvalidSpec,
    InvalidArgument,
    InvalidConfig,
    MissingUpstreamArtifact,
    Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Process exit code for the CLI: 2 validation, 3 data, 4 internal.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace teamflow
