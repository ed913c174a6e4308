#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osserman {

enum class ErrorKind {
    NonSymmetric,
    NonFinite,
    AmbiguousClustering,
    ShapeMismatch,
    DimensionMismatch,
    NotUnit,
    InvalidSystem,
    ExceedsRadonBound,
    InvalidMu,
    NotOsserman,
    TieBreakNeeded,
    SpectrumMismatch,
    AlignmentFailed,
    GenericityExhausted,
    FrameInconsistent,
    UnstableSubspace,
    GaugeFailed,
    PeelInconsistent,
    ReconstructionMismatch,
    HypothesesViolated,
    ObstructionDetected,
    InvalidTensor,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. `stage` is filled in by the
/// recovery pipeline so callers can tell where a multi-step run failed.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string stage = {})
        : std::runtime_error(what), kind_(kind), stage_(std::move(stage)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    ErrorKind kind_;
    std::string stage_;
};

}  // namespace osserman
