#pragma once

#include "oscpipe/model.hpp"

#include <cstdint>
#include <utility>

namespace osc {

/// Counters for one refinement pass; aggregates add element-wise.
struct RefinementReport {
    std::int64_t flips_causal = 0;
    std::int64_t resolved_ambiguous = 0;
    std::int64_t iterations = 0;

    RefinementReport& operator+=(const RefinementReport& other) {
        flips_causal += other.flips_causal;
        resolved_ambiguous += other.resolved_ambiguous;
        iterations += other.iterations;
        return *this;
    }
};

/// Enforces the irreversible-transition order within one masklet: on exit,
/// every Actionable index precedes every Transformed index (when both
/// classes are nonempty). While the last Actionable index trails the first
/// Transformed one, the label farther from its class's time-series midpoint
/// is flipped to the other class; midpoints are recomputed from the current
/// sets each iteration, and equal distances flip the early Transformed
/// label. Background and Ambiguous entries are untouched.
std::pair<LabelSequence, RefinementReport> causal_ordering(LabelSequence seq);

/// Resolves every Ambiguous index by proximity: to Actionable when it is
/// strictly closer to max(S_act) than to min(S_trf), else to Transformed.
/// Both boundaries are fixed before any resolution. With only one class
/// present the Ambiguous entries join it; with neither they are retained.
std::pair<LabelSequence, RefinementReport> ambiguity_resolution(LabelSequence seq);

/// causal_ordering then ambiguity_resolution for one masklet.
std::pair<LabelSequence, RefinementReport> refine_sequence(LabelSequence seq);

/// Refines every masklet of a clip independently; reports are summed.
std::pair<LabelMap, RefinementReport> refine_clip(LabelMap labels);

} // namespace osc
