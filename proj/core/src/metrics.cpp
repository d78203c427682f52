#include "oscpipe/metrics.hpp"

#include "oscpipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace osc {

const char* to_string(SplitFilter split) {
    switch (split) {
        case SplitFilter::Full: return "full";
        case SplitFilter::Transition: return "transition";
        case SplitFilter::Seen: return "seen";
        case SplitFilter::Novel: return "novel";
    }
    return "?";
}

SplitFilter split_filter_from_string(const std::string& token) {
    if (token == "full") return SplitFilter::Full;
    if (token == "transition") return SplitFilter::Transition;
    if (token == "seen") return SplitFilter::Seen;
    if (token == "novel") return SplitFilter::Novel;
    throw Error("unknown split filter '" + token + "'");
}

ClipPredictions composite_prediction(const ClipRecord& clip, const LabelMap& labels) {
    // collect scored claims per frame
    struct Claim {
        const MaskRegion* region;
        StateLabel label;
        double margin;
    };
    std::vector<std::vector<Claim>> claims(static_cast<std::size_t>(clip.frame_count));
    for (const auto& masklet : clip.masklets) {
        const auto it = labels.find(masklet.track_id);
        if (it == labels.end())
            fail_located("", clip.clip_id, masklet.track_id, -1,
                         "no label sequence for masklet");
        const LabelSequence& seq = it->second;
        for (const auto& region : masklet.regions) {
            const auto lit = seq.labels.find(region.frame_index);
            if (lit == seq.labels.end())
                fail_located("", clip.clip_id, masklet.track_id, region.frame_index,
                             "label sequence does not cover region frame");
            const StateLabel label = lit->second;
            if (label != StateLabel::Actionable && label != StateLabel::Transformed)
                continue; // Ambiguous / Background contribute no mask
            double margin = 0.0;
            if (region.scores)
                margin = label == StateLabel::Actionable
                             ? region.scores->act - region.scores->trf
                             : region.scores->trf - region.scores->act;
            claims[static_cast<std::size_t>(region.frame_index)].push_back(
                {&region, label, margin});
        }
    }

    const std::size_t pixels =
        static_cast<std::size_t>(clip.height) * static_cast<std::size_t>(clip.width);
    constexpr double kUnclaimed = -std::numeric_limits<double>::infinity();
    std::vector<double> best_act(pixels), best_trf(pixels);

    ClipPredictions preds;
    preds.reserve(claims.size());
    for (const auto& frame_claims : claims) {
        if (frame_claims.empty()) {
            preds.push_back({empty_mask(clip.height, clip.width),
                             empty_mask(clip.height, clip.width)});
            continue;
        }
        std::fill(best_act.begin(), best_act.end(), kUnclaimed);
        std::fill(best_trf.begin(), best_trf.end(), kUnclaimed);
        for (const Claim& claim : frame_claims) {
            auto& best = claim.label == StateLabel::Actionable ? best_act : best_trf;
            for (const auto& [lo, hi] : mask_intervals(claim.region->mask))
                for (std::int64_t p = lo; p < hi; ++p)
                    best[static_cast<std::size_t>(p)] =
                        std::max(best[static_cast<std::size_t>(p)], claim.margin);
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> act_spans, trf_spans;
        for (std::size_t p = 0; p < pixels; ++p) {
            const bool has_act = best_act[p] != kUnclaimed;
            const bool has_trf = best_trf[p] != kUnclaimed;
            if (!has_act && !has_trf) continue;
            // contested pixels: larger margin wins, ties go to Transformed
            const bool actionable = has_act && (!has_trf || best_act[p] > best_trf[p]);
            auto& spans = actionable ? act_spans : trf_spans;
            const auto pi = static_cast<std::int64_t>(p);
            if (!spans.empty() && spans.back().second == pi) spans.back().second = pi + 1;
            else spans.emplace_back(pi, pi + 1);
        }
        preds.push_back({mask_from_intervals(clip.height, clip.width, act_spans),
                         mask_from_intervals(clip.height, clip.width, trf_spans)});
    }
    return preds;
}

std::optional<double> frame_iou(const PixelMask& pred, const PixelMask& gt) {
    const std::int64_t uni = union_area(pred, gt);
    if (uni == 0) return std::nullopt;
    return static_cast<double>(intersection_area(pred, gt)) / static_cast<double>(uni);
}

namespace {

struct MeanAccumulator {
    double sum = 0.0;
    std::int64_t count = 0;
    void add(double v) { sum += v; ++count; }
    std::optional<double> mean() const {
        if (count == 0) return std::nullopt;
        return sum / static_cast<double>(count);
    }
};

struct ClassSums {
    MeanAccumulator act, trf, fused;
    std::int64_t frames_evaluated = 0;
};

std::optional<double> combine(const std::optional<double>& a,
                              const std::optional<double>& b) {
    if (!a || !b) return std::nullopt;
    return (*a + *b) / 2.0;
}

} // namespace

EvalResult evaluate(std::span<const ClipRecord* const> clips,
                    const CorpusPredictions& predictions, const EvalConfig& cfg) {
    // which clips participate under the split filter
    std::vector<const ClipRecord*> evaluated;
    std::vector<std::string> missing;
    for (const ClipRecord* clip : clips) {
        if (!clip->has_ground_truth()) continue;
        if (cfg.split == SplitFilter::Seen && clip->split != SplitTag::Seen) continue;
        if (cfg.split == SplitFilter::Novel && clip->split != SplitTag::Novel) continue;
        if (cfg.split == SplitFilter::Transition) {
            const bool labeled = std::any_of(
                clip->frame_phases.begin(), clip->frame_phases.end(),
                [](FramePhase p) { return p != FramePhase::Unlabeled; });
            if (!labeled)
                throw Error("transition split requires labeled frame phases; clip '" +
                            clip->clip_id + "' has none");
        }
        if (!predictions.count(clip->clip_id)) {
            missing.push_back(clip->clip_id);
            continue;
        }
        evaluated.push_back(clip);
    }
    if (!missing.empty()) {
        std::string joined;
        for (const auto& id : missing) joined += (joined.empty() ? "" : ", ") + id;
        throw Error("missing predictions for clips: " + joined);
    }

    // canonical accumulation order makes the result independent of how the
    // caller ordered the clips, down to the last bit
    std::sort(evaluated.begin(), evaluated.end(),
              [](const ClipRecord* a, const ClipRecord* b) { return a->clip_id < b->clip_id; });

    EvalResult result;
    ClassSums overall;
    std::map<std::string, ClassSums> per_verb;

    for (const ClipRecord* clip : evaluated) {
        const ClipPredictions& preds = predictions.at(clip->clip_id);
        if (static_cast<int>(preds.size()) != clip->frame_count)
            throw Error("predictions for clip '" + clip->clip_id + "' cover " +
                        std::to_string(preds.size()) + " frames, expected " +
                        std::to_string(clip->frame_count));
        ClassSums& verb_sums = per_verb[clip->osc.verb];
        for (const GroundTruthFrame& gt : clip->ground_truth) {
            if (cfg.split == SplitFilter::Transition &&
                clip->frame_phases[static_cast<std::size_t>(gt.frame_index)] !=
                    FramePhase::Transition)
                continue;
            if (gt.ignored) {
                ++result.frames_ignored;
                continue;
            }
            const FramePrediction& pred = preds[static_cast<std::size_t>(gt.frame_index)];
            std::optional<double> iou_fused, iou_act, iou_trf;
            if (cfg.fuse_states) {
                iou_fused = frame_iou(mask_union(pred.actionable, pred.transformed),
                                      mask_union(gt.actionable, gt.transformed));
            } else {
                iou_act = frame_iou(pred.actionable, gt.actionable);
                iou_trf = frame_iou(pred.transformed, gt.transformed);
            }
            for (ClassSums* sums : {&overall, &verb_sums}) {
                ++sums->frames_evaluated;
                if (iou_fused) sums->fused.add(*iou_fused);
                if (iou_act) sums->act.add(*iou_act);
                if (iou_trf) sums->trf.add(*iou_trf);
            }
        }
    }

    result.frames_evaluated = overall.frames_evaluated;
    if (cfg.fuse_states) {
        result.miou = overall.fused.mean();
    } else {
        result.miou_act = overall.act.mean();
        result.miou_trf = overall.trf.mean();
        result.miou = combine(result.miou_act, result.miou_trf);
    }

    MeanAccumulator verb_mean;
    for (const auto& [verb, sums] : per_verb) {
        VerbScore score;
        score.frames_evaluated = sums.frames_evaluated;
        if (cfg.fuse_states) {
            score.miou = sums.fused.mean();
        } else {
            score.miou_act = sums.act.mean();
            score.miou_trf = sums.trf.mean();
            score.miou = combine(score.miou_act, score.miou_trf);
        }
        if (score.miou) verb_mean.add(*score.miou);
        result.per_verb[verb] = score;
    }
    result.verb_mean = verb_mean.mean();

    result.notes = {
        "miou = (miou_act + miou_trf) / 2",
        "frame pooling: IoUs are pooled over frames per verb and overall, "
        "not averaged per clip",
        "undefined-IoU convention: frames where a class is empty in both "
        "prediction and ground truth are excluded from that class's mean; "
        "empty-vs-nonempty scores 0",
        "verb_mean is the unweighted mean over per-verb mious",
        "ignored ground-truth frames are not considered",
    };
    return result;
}

EvalResult evaluate(std::span<const ClipRecord> clips,
                    const CorpusPredictions& predictions, const EvalConfig& cfg) {
    std::vector<const ClipRecord*> pointers;
    pointers.reserve(clips.size());
    for (const auto& clip : clips) pointers.push_back(&clip);
    return evaluate(std::span<const ClipRecord* const>(pointers), predictions, cfg);
}

LabelMap oracle_labels(const ClipRecord& clip, double theta) {
    if (!clip.has_ground_truth())
        throw Error("oracle labels need ground truth; clip '" + clip.clip_id + "' has none");
    LabelMap out;
    for (const auto& masklet : clip.masklets) {
        LabelSequence seq;
        seq.track_id = masklet.track_id;
        for (const auto& region : masklet.regions) {
            StateLabel label = StateLabel::Background;
            const GroundTruthFrame* gt = clip.gt_at(region.frame_index);
            if (gt && !gt->ignored) {
                const auto area = static_cast<double>(mask_area(region.mask));
                const double frac_act =
                    static_cast<double>(intersection_area(region.mask, gt->actionable)) / area;
                const double frac_trf =
                    static_cast<double>(intersection_area(region.mask, gt->transformed)) / area;
                if (frac_act > theta && frac_act > frac_trf) label = StateLabel::Actionable;
                else if (frac_trf > theta && frac_trf > frac_act) label = StateLabel::Transformed;
            }
            seq.labels[region.frame_index] = label;
        }
        out[masklet.track_id] = std::move(seq);
    }
    return out;
}

} // namespace osc
