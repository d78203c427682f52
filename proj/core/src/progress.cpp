#include "oscpipe/progress.hpp"

#include "oscpipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace osc {

namespace {

ProgressCurve curve_from_masks(const ClipRecord& clip,
                               std::span<const FramePrediction> frames) {
    if (static_cast<int>(frames.size()) != clip.frame_count)
        throw Error("progress curve for clip '" + clip.clip_id + "' needs " +
                    std::to_string(clip.frame_count) + " frames, got " +
                    std::to_string(frames.size()));
    ProgressCurve curve;
    curve.values.reserve(frames.size());
    curve.phases = clip.frame_phases;
    if (curve.phases.empty())
        curve.phases.assign(static_cast<std::size_t>(clip.frame_count),
                            FramePhase::Unlabeled);
    for (const FramePrediction& frame : frames) {
        const std::int64_t total = union_area(frame.actionable, frame.transformed);
        if (total == 0) {
            curve.values.emplace_back(std::nullopt);
        } else {
            curve.values.emplace_back(static_cast<double>(mask_area(frame.actionable)) /
                                      static_cast<double>(total));
        }
    }
    return curve;
}

// pairs i<j with v_i < v_j, counted by merge sort in O(n log n)
std::int64_t count_increasing_pairs(std::vector<double> values) {
    std::vector<double> buffer(values.size());
    std::int64_t descents_and_ties = 0; // pairs with v_i >= v_j
    const auto merge_count = [&](auto&& self, std::size_t lo, std::size_t hi) -> void {
        if (hi - lo <= 1) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        self(self, lo, mid);
        self(self, mid, hi);
        std::size_t i = lo, j = mid, k = lo;
        while (i < mid && j < hi) {
            if (values[j] <= values[i]) {
                // every remaining left element pairs non-increasingly with values[j]
                descents_and_ties += static_cast<std::int64_t>(mid - i);
                buffer[k++] = values[j++];
            } else {
                buffer[k++] = values[i++];
            }
        }
        while (i < mid) buffer[k++] = values[i++];
        while (j < hi) buffer[k++] = values[j++];
        std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
                  buffer.begin() + static_cast<std::ptrdiff_t>(hi),
                  values.begin() + static_cast<std::ptrdiff_t>(lo));
    };
    merge_count(merge_count, 0, values.size());
    const auto n = static_cast<std::int64_t>(values.size());
    return n * (n - 1) / 2 - descents_and_ties;
}

} // namespace

ProgressCurve progress_curve(const ClipRecord& clip,
                             std::span<const FramePrediction> predictions) {
    return curve_from_masks(clip, predictions);
}

ProgressCurve progress_curve_from_gt(const ClipRecord& clip) {
    ClipPredictions frames(static_cast<std::size_t>(clip.frame_count),
                           {empty_mask(clip.height, clip.width),
                            empty_mask(clip.height, clip.width)});
    for (const GroundTruthFrame& gt : clip.ground_truth) {
        if (gt.ignored) continue; // no usable annotation on ignored frames
        frames[static_cast<std::size_t>(gt.frame_index)] = {gt.actionable, gt.transformed};
    }
    return curve_from_masks(clip, frames);
}

std::optional<double> kendall_tau(const ProgressCurve& curve) {
    std::vector<double> present;
    present.reserve(curve.values.size());
    for (const auto& v : curve.values)
        if (v) present.push_back(*v);
    const auto n = static_cast<std::int64_t>(present.size());
    if (n < 2) return std::nullopt;
    const std::int64_t total = n * (n - 1) / 2;
    const std::int64_t increasing = count_increasing_pairs(std::move(present));
    const std::int64_t non_increasing = total - increasing;
    return static_cast<double>(increasing - non_increasing) / static_cast<double>(total);
}

std::optional<EndStateMetrics> end_state_metrics(const ProgressCurve& curve) {
    std::vector<double> end_values;
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        if (curve.phases[i] == FramePhase::End && curve.values[i])
            end_values.push_back(*curve.values[i]);
    if (end_values.empty()) return std::nullopt;
    const auto n = static_cast<double>(end_values.size());
    double mean = 0.0, mean_sq = 0.0;
    for (const double v : end_values) {
        mean += v;
        mean_sq += v * v;
    }
    mean /= n;
    mean_sq /= n;
    double variance = 0.0;
    for (const double v : end_values) variance += (v - mean) * (v - mean);
    variance /= n; // population variance: the end-state frames are the population
    return EndStateMetrics{variance, std::sqrt(mean_sq)};
}

namespace {

ProgressReport build_report(std::span<const ClipRecord> clips,
                            const std::function<ProgressCurve(const ClipRecord&)>& curve_fn) {
    ProgressReport report;
    double tau_sum = 0.0, sigma_sum = 0.0, l2_sum = 0.0;
    std::int64_t end_count = 0;
    for (const ClipRecord& clip : clips) {
        ClipProgress cp;
        cp.clip_id = clip.clip_id;
        cp.curve = curve_fn(clip);
        cp.metrics.tau = kendall_tau(cp.curve);
        if (const auto end = end_state_metrics(cp.curve)) {
            cp.metrics.end_sigma = end->sigma;
            cp.metrics.end_l2 = end->l2;
        }
        if (cp.metrics.tau) {
            tau_sum += *cp.metrics.tau;
            ++report.clips_with_tau;
        } else {
            report.undefined_tau_clips.push_back(clip.clip_id);
        }
        if (cp.metrics.end_sigma) {
            sigma_sum += *cp.metrics.end_sigma;
            l2_sum += *cp.metrics.end_l2;
            ++end_count;
        } else {
            report.undefined_end_clips.push_back(clip.clip_id);
        }
        report.clips.push_back(std::move(cp));
    }
    report.clips_with_end = end_count;
    if (report.clips_with_tau > 0)
        report.aggregate.tau = tau_sum / static_cast<double>(report.clips_with_tau);
    if (end_count > 0) {
        report.aggregate.end_sigma = sigma_sum / static_cast<double>(end_count);
        report.aggregate.end_l2 = l2_sum / static_cast<double>(end_count);
    }
    report.notes = {
        "tau tie convention: equal values count as non-increasing pairs, so a "
        "constant curve scores -1",
        "end_l2 is the root mean square of end-state curve values",
        "end_sigma is the population variance of end-state curve values",
        "curves are not smoothed",
        "aggregate metrics are unweighted means over clips where defined",
    };
    return report;
}

} // namespace

ProgressReport progress_report(std::span<const ClipRecord> clips,
                               const CorpusPredictions& predictions) {
    std::vector<std::string> missing;
    for (const ClipRecord& clip : clips)
        if (!predictions.count(clip.clip_id)) missing.push_back(clip.clip_id);
    if (!missing.empty()) {
        std::string joined;
        for (const auto& id : missing) joined += (joined.empty() ? "" : ", ") + id;
        throw Error("missing predictions for clips: " + joined);
    }
    return build_report(clips, [&](const ClipRecord& clip) {
        return progress_curve(clip, predictions.at(clip.clip_id));
    });
}

ProgressReport progress_report_from_gt(std::span<const ClipRecord> clips) {
    return build_report(clips,
                        [](const ClipRecord& clip) { return progress_curve_from_gt(clip); });
}

} // namespace osc
