#pragma once

#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

/// Half-open sample-index interval [lo, hi).
struct IndexInterval {
    Index lo = 0;
    Index hi = 0;

    bool intersects(Index a, Index b) const { return a < hi && lo < b; }
};

struct LabeledSegment {
    Window window;       // standardized when produced by build_training_set
    int label = 0;       // fall = 1, adl = 0
    std::string subject_id;
};

struct TrainingSet {
    std::vector<LabeledSegment> segments;
    double w_seconds = 0.0;
    int fs = 0;
    int skipped_falls = 0;  // annotations whose segment fell outside the recording

    Index count_label(int label) const {
        Index n = 0;
        for (const auto& s : segments) n += (s.label == label) ? 1 : 0;
        return n;
    }
};

inline constexpr Scalar kDefaultGateG = 1.4;
inline constexpr double kDefaultGuardSeconds = 5.0;

/// Cut the fall segment for an annotated impact: the window starts 1 s before
/// the impact sample and spans w seconds (falling and impact phases take 1 s
/// each, the remaining w-2 s capture rest and recovery). Returns the raw,
/// unstandardized slice.
/// Throws DomainError if w < 3, BoundaryError if the segment does not fit.
Window extract_fall_segment(const Signal& sig, Index impact_index, double w_seconds);

/// All sliding windows on the step grid that avoid every exclusion interval
/// and whose raw magnitude exceeds gate_g somewhere in the window. Raw slices.
std::vector<Window> extract_adl_segments(const Signal& sig, double w_seconds,
                                         double step_seconds,
                                         const std::vector<IndexInterval>& exclusions,
                                         Scalar gate_g = kDefaultGateG);

/// Exclusion zone for one annotated impact: the fall segment plus a guard band
/// on each side, in sample indices (may extend past the recording bounds).
IndexInterval fall_exclusion_zone(Index impact_index, int fs, double w_seconds,
                                  double guard_seconds = kDefaultGuardSeconds);

/// Assemble the labeled training set from annotated recordings: one fall
/// segment per annotation (out-of-bounds annotations are skipped and counted),
/// gated ADL windows elsewhere, every window standardized, subject ids kept
/// for participant-wise splitting.
/// Throws EmptyTrainingSetError when no signal yields any segment.
TrainingSet build_training_set(const std::vector<Signal>& signals, double w_seconds,
                               Scalar gate_g = kDefaultGateG,
                               double step_seconds = 1.0,
                               double guard_seconds = kDefaultGuardSeconds);

}  // namespace falldet
