#include "falldet/signal_core.hpp"

#include <cmath>

#include "falldet/errors.hpp"

namespace falldet {

Scalar magnitude(const TriaxialSample& s) {
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az)) {
        throw InvalidSampleError("tri-axial sample has non-finite component");
    }
    return std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az);
}

Scalar population_std(const Eigen::Ref<const Array>& values) {
    const Scalar mean = values.mean();
    return std::sqrt((values - mean).square().mean());
}

Window standardize(const Window& win) {
    Window out;
    out.start_index = win.start_index;
    out.w_seconds = win.w_seconds;

    const Scalar mean = win.values.mean();
    const Scalar sd = population_std(win.values);

    // Constant windows can carry a tiny rounding residue in sd; treat anything
    // below the relative noise floor as zero variance.
    if (sd <= 1e-12 * std::max(Scalar{1}, std::abs(mean))) {
        out.values = Array::Zero(win.values.size());
    } else {
        out.values = (win.values - mean) / sd;
    }
    return out;
}

}  // namespace falldet
