#pragma once

#include "oscpipe/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osc {

enum class SplitFilter { Full, Transition, Seen, Novel };

const char* to_string(SplitFilter split);
SplitFilter split_filter_from_string(const std::string& token);

struct EvalConfig {
    SplitFilter split = SplitFilter::Full;
    bool fuse_states = false; // score a single state-agnostic object mask
};

/// Rasterized per-frame prediction for one clip, both classes disjoint.
struct FramePrediction {
    PixelMask actionable;
    PixelMask transformed;
};

using ClipPredictions = std::vector<FramePrediction>;           // indexed by frame
using CorpusPredictions = std::map<std::string, ClipPredictions>; // clip_id ->

/// Rasterizes labeled masklets into per-frame class masks. Each region
/// contributes its mask to the class it is labeled with; Ambiguous and
/// Background regions contribute nothing. A pixel claimed by both classes
/// goes to the claim with the larger winning-score margin (score gap in the
/// claimed class's favor, 0 for unscored regions); ties go to Transformed.
ClipPredictions composite_prediction(const ClipRecord& clip, const LabelMap& labels);

/// Jaccard index |intersection| / |union|. Absent when both masks are
/// empty; 0 when exactly one is.
std::optional<double> frame_iou(const PixelMask& pred, const PixelMask& gt);

struct VerbScore {
    std::optional<double> miou;
    std::optional<double> miou_act;
    std::optional<double> miou_trf;
    std::int64_t frames_evaluated = 0;
};

struct EvalResult {
    std::optional<double> miou;     // (miou_act + miou_trf) / 2, or the fused mean
    std::optional<double> miou_act; // absent in fused mode or with no defined frames
    std::optional<double> miou_trf;
    std::map<std::string, VerbScore> per_verb;
    std::optional<double> verb_mean; // unweighted mean of per-verb mious
    std::int64_t frames_evaluated = 0;
    std::int64_t frames_ignored = 0;
    std::vector<std::string> notes; // scoring conventions, recorded in artifacts
};

/// Frame-pooled evaluation over every ground-truth frame that survives the
/// split filter and is not ignored. Per class, frames where prediction and
/// ground truth are both empty are excluded from the mean; an empty side
/// against a nonempty one scores 0. Missing predictions raise an error
/// listing the clip ids.
EvalResult evaluate(std::span<const ClipRecord* const> clips,
                    const CorpusPredictions& predictions, const EvalConfig& cfg);
EvalResult evaluate(std::span<const ClipRecord> clips,
                    const CorpusPredictions& predictions, const EvalConfig& cfg);

/// Upper-bound labels assigned from ground truth: a region becomes a state
/// when its overlap fraction with that state's mask exceeds `theta` and
/// exceeds the other state's overlap; otherwise Background. Regions on
/// frames without usable ground truth are Background.
LabelMap oracle_labels(const ClipRecord& clip, double theta = 0.5);

} // namespace osc
