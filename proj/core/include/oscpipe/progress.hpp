#pragma once

#include "oscpipe/metrics.hpp"
#include "oscpipe/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osc {

/// Per-frame activity progress: the fraction of state area still
/// actionable. Frames with no state area at all carry no value.
struct ProgressCurve {
    std::vector<std::optional<double>> values; // indexed by frame
    std::vector<FramePhase> phases;            // same length
};

/// Progress value per frame: |actionable| / |actionable U transformed|.
/// The composite prediction keeps the classes disjoint, so the denominator
/// equals the area sum; overlapping caller-supplied masks still get an
/// honest union area.
ProgressCurve progress_curve(const ClipRecord& clip,
                             std::span<const FramePrediction> predictions);

/// Curve from the ground-truth annotation masks instead of predictions.
ProgressCurve progress_curve_from_gt(const ClipRecord& clip);

/// Monotonicity index over all ordered pairs of present values:
/// (increasing - non-increasing) / total, where ties count non-increasing.
/// -1 means perfectly non-increasing. Absent with fewer than two present
/// values. O(n log n); exact match with pair enumeration.
std::optional<double> kendall_tau(const ProgressCurve& curve);

struct EndStateMetrics {
    double sigma = 0.0; // population variance over end-state values
    double l2 = 0.0;    // root mean square over end-state values
};

/// Completion metrics over End-phase frames with present values; absent
/// when there are none. Ideal values are 0 for both.
std::optional<EndStateMetrics> end_state_metrics(const ProgressCurve& curve);

struct ProgressMetrics {
    std::optional<double> tau;
    std::optional<double> end_sigma;
    std::optional<double> end_l2;
};

struct ClipProgress {
    std::string clip_id;
    ProgressCurve curve;
    ProgressMetrics metrics;
};

struct ProgressReport {
    std::vector<ClipProgress> clips;
    ProgressMetrics aggregate;      // unweighted mean over clips with defined metrics
    std::int64_t clips_with_tau = 0;
    std::int64_t clips_with_end = 0;
    std::vector<std::string> undefined_tau_clips;
    std::vector<std::string> undefined_end_clips;
    std::vector<std::string> notes;
};

ProgressReport progress_report(std::span<const ClipRecord> clips,
                               const CorpusPredictions& predictions);

/// Report over curves computed from ground truth.
ProgressReport progress_report_from_gt(std::span<const ClipRecord> clips);

} // namespace osc
