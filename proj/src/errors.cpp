#include "osserman/errors.hpp"

namespace osserman {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonSymmetric: return "NonSymmetric";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::AmbiguousClustering: return "AmbiguousClustering";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::InvalidSystem: return "InvalidSystem";
        case ErrorKind::ExceedsRadonBound: return "ExceedsRadonBound";
        case ErrorKind::InvalidMu: return "InvalidMu";
        case ErrorKind::NotOsserman: return "NotOsserman";
        case ErrorKind::TieBreakNeeded: return "TieBreakNeeded";
        case ErrorKind::SpectrumMismatch: return "SpectrumMismatch";
        case ErrorKind::AlignmentFailed: return "AlignmentFailed";
        case ErrorKind::GenericityExhausted: return "GenericityExhausted";
        case ErrorKind::FrameInconsistent: return "FrameInconsistent";
        case ErrorKind::UnstableSubspace: return "UnstableSubspace";
        case ErrorKind::GaugeFailed: return "GaugeFailed";
        case ErrorKind::PeelInconsistent: return "PeelInconsistent";
        case ErrorKind::ReconstructionMismatch: return "ReconstructionMismatch";
        case ErrorKind::HypothesesViolated: return "HypothesesViolated";
        case ErrorKind::ObstructionDetected: return "ObstructionDetected";
        case ErrorKind::InvalidTensor: return "InvalidTensor";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace osserman
