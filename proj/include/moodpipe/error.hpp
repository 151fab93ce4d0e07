#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moodpipe {

enum class ErrorKind {
    InvalidChannelCount,
    InvalidWindow,
    InvalidSigma,
    InvalidRect,
    InvalidRadiusRange,
    InvalidDimensions,
    ImageTooSmall,
    NoFaceDetected,
    FaceTooSmall,
    NoFeatureEvidence,
    FeatureNotFound,
    MissingFeature,
    DegenerateCurvature,
    DimensionError,
    DegenerateLabels,
    EmptyDataset,
    InvalidParams,
    IoError,
    ConfigError,
    FormatError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidChannelCount: return "InvalidChannelCount";
        case ErrorKind::InvalidWindow: return "InvalidWindow";
        case ErrorKind::InvalidSigma: return "InvalidSigma";
        case ErrorKind::InvalidRect: return "InvalidRect";
        case ErrorKind::InvalidRadiusRange: return "InvalidRadiusRange";
        case ErrorKind::InvalidDimensions: return "InvalidDimensions";
        case ErrorKind::ImageTooSmall: return "ImageTooSmall";
        case ErrorKind::NoFaceDetected: return "NoFaceDetected";
        case ErrorKind::FaceTooSmall: return "FaceTooSmall";
        case ErrorKind::NoFeatureEvidence: return "NoFeatureEvidence";
        case ErrorKind::FeatureNotFound: return "FeatureNotFound";
        case ErrorKind::MissingFeature: return "MissingFeature";
        case ErrorKind::DegenerateCurvature: return "DegenerateCurvature";
        case ErrorKind::DimensionError: return "DimensionError";
        case ErrorKind::DegenerateLabels: return "DegenerateLabels";
        case ErrorKind::EmptyDataset: return "EmptyDataset";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::FormatError: return "FormatError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `detail()` carries the offending
/// feature name for FeatureNotFound / MissingFeature, empty otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string detail = {})
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          detail_(std::move(detail)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace moodpipe
