#pragma once

#include "falldet/types.hpp"

namespace falldet {

/// Euclidean norm of a tri-axial sample. Rotation-invariant by construction.
/// Throws InvalidSampleError on non-finite components.
Scalar magnitude(const TriaxialSample& s);

/// Per-window z-normalization: output has sample mean 0 and population
/// standard deviation 1. Zero-variance windows map to all zeros so a sensor
/// at rest still flows through the pipeline. Pure function.
Window standardize(const Window& win);

/// Population standard deviation of an array (divides by N, not N-1).
Scalar population_std(const Eigen::Ref<const Array>& values);

}  // namespace falldet
