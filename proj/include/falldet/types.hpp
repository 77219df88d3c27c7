#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace falldet {

using Scalar = double;
using Index = Eigen::Index;
using Array = Eigen::ArrayXd;  // 1-D sample storage, g units or z-scores
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One tri-axial accelerometer reading in g units (1 g = 9.81 m/s^2).
struct TriaxialSample {
    Scalar ax = 0.0;
    Scalar ay = 0.0;
    Scalar az = 0.0;
};

/// Ground-truth fall impact, as a sample index into the owning signal.
struct Annotation {
    Index impact_index = 0;
};

/// Univariate acceleration-magnitude recording at a fixed sampling rate.
/// Immutable value data once built; safe to share read-only across threads.
struct Signal {
    Array samples;  // magnitudes, g units, all >= 0 and finite
    int fs = 100;   // Hz
    std::string subject_id;
    std::vector<Annotation> annotations;

    Index size() const { return samples.size(); }
    double duration_seconds() const {
        return static_cast<double>(samples.size()) / static_cast<double>(fs);
    }
};

/// Fixed-length contiguous slice of a Signal; the unit of classification.
struct Window {
    Array values;
    Index start_index = 0;  // offset into the parent signal
    double w_seconds = 0.0;
};

}  // namespace falldet
