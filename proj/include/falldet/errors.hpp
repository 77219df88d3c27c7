#pragma once

#include <stdexcept>
#include <string>

namespace falldet {

// Four error categories, one per CLI exit code. Specific failures derive
// from whichever category the CLI should report.

/// Invalid or infeasible configuration (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File-system or format failures (exit code 3).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training data unusable: empty or single-class (exit code 4).
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller violated an operation contract (exit code 5).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSampleError : ContractError {
    using ContractError::ContractError;
};
struct BoundaryError : ContractError {
    using ContractError::ContractError;
};
struct ShapeError : ContractError {
    using ContractError::ContractError;
};
struct TooShortError : ContractError {
    using ContractError::ContractError;
};
struct DomainError : ContractError {
    using ContractError::ContractError;
};
struct FeatureSpecError : ContractError {
    using ContractError::ContractError;
};
struct PlacementError : ContractError {
    using ContractError::ContractError;
};

struct EmptyTrainingSetError : DegenerateDataError {
    using DegenerateDataError::DegenerateDataError;
};
struct DegenerateTrainingError : DegenerateDataError {
    using DegenerateDataError::DegenerateDataError;
};

struct SplitError : ConfigError {
    using ConfigError::ConfigError;
};

struct VersionError : IoError {
    using IoError::IoError;
};
struct CorruptModelError : IoError {
    using IoError::IoError;
};

}  // namespace falldet
