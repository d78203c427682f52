#include "oscpipe/labeling.hpp"

#include "oscpipe/error.hpp"
#include "oscpipe/metrics.hpp"

#include <cmath>

namespace osc {

SimilarityPair compute_similarity(std::span<const double> vision,
                                  const TextEmbeddings& text) {
    if (vision.size() != text.act.size() || vision.size() != text.trf.size())
        throw Error("embedding dimension mismatch: vision " + std::to_string(vision.size()) +
                    ", text " + std::to_string(text.act.size()) + "/" +
                    std::to_string(text.trf.size()));
    SimilarityPair s;
    for (std::size_t i = 0; i < vision.size(); ++i) {
        s.act += vision[i] * text.act[i];
        s.trf += vision[i] * text.trf[i];
    }
    return s;
}

StateLabel threshold_label(SimilarityPair scores, ThresholdConfig cfg) {
    if (scores.act + scores.trf < cfg.tau) return StateLabel::Background;
    if (std::abs(scores.act - scores.trf) < cfg.delta) return StateLabel::Ambiguous;
    if (scores.act > scores.trf) return StateLabel::Actionable;
    if (scores.trf > scores.act) return StateLabel::Transformed;
    return StateLabel::Ambiguous; // exact tie with delta == 0
}

LabelMap pseudo_label_clip(const ClipRecord& clip, ThresholdConfig cfg) {
    LabelMap out;
    for (const auto& masklet : clip.masklets) {
        LabelSequence seq;
        seq.track_id = masklet.track_id;
        for (const auto& region : masklet.regions) {
            SimilarityPair scores;
            if (region.scores) {
                scores = *region.scores; // precomputed scores win over embeddings
            } else if (region.embedding) {
                if (!clip.text_embeddings)
                    fail_located("", clip.clip_id, masklet.track_id, region.frame_index,
                                 "region carries an embedding but the clip has no text "
                                 "embeddings to score it against");
                scores = compute_similarity(*region.embedding, *clip.text_embeddings);
            } else {
                fail_located("", clip.clip_id, masklet.track_id, region.frame_index,
                             "region has neither similarity scores nor an embedding");
            }
            seq.labels[region.frame_index] = threshold_label(scores, cfg);
        }
        out[masklet.track_id] = std::move(seq);
    }
    return out;
}

LabelMap pseudo_label_clip(const ClipRecord& clip, const ThresholdTable& table) {
    return pseudo_label_clip(clip, table.for_verb(clip.osc.verb));
}

namespace {

// (miou desc, tau asc, delta asc); absent miou sorts below any defined one
bool better_candidate(const GridCell& a, const GridCell& b) {
    if (a.miou.has_value() != b.miou.has_value()) return a.miou.has_value();
    if (a.miou && b.miou && *a.miou != *b.miou) return *a.miou > *b.miou;
    if (a.config.tau != b.config.tau) return a.config.tau < b.config.tau;
    return a.config.delta < b.config.delta;
}

} // namespace

GridSearchResult grid_search_thresholds(std::span<const ThresholdConfig> candidates,
                                        std::span<const ClipRecord> dev_clips,
                                        const GridEvaluator& evaluate_miou) {
    if (candidates.empty()) throw Error("grid search needs at least one candidate config");
    for (const auto& clip : dev_clips)
        if (!clip.has_ground_truth())
            throw Error("grid search dev clip '" + clip.clip_id + "' has no ground truth");

    std::map<std::string, std::vector<const ClipRecord*>> by_verb;
    for (const auto& clip : dev_clips) by_verb[clip.osc.verb].push_back(&clip);

    GridSearchResult result;
    for (const auto& [verb, clips] : by_verb) {
        std::vector<GridCell>& grid = result.grid_per_verb[verb];
        grid.reserve(candidates.size());
        for (const auto& candidate : candidates) {
            GridCell cell{candidate, evaluate_miou(clips, candidate)};
            grid.push_back(cell);
        }
        const GridCell* best = &grid.front();
        for (const auto& cell : grid)
            if (better_candidate(cell, *best)) best = &cell;
        result.best_per_verb[verb] = best->config;
    }
    return result;
}

GridEvaluator default_grid_evaluator() {
    return [](std::span<const ClipRecord* const> clips,
              ThresholdConfig cfg) -> std::optional<double> {
        CorpusPredictions predictions;
        std::vector<ClipRecord> owned;
        owned.reserve(clips.size());
        for (const ClipRecord* clip : clips) {
            predictions[clip->clip_id] =
                composite_prediction(*clip, pseudo_label_clip(*clip, cfg));
            owned.push_back(*clip);
        }
        const EvalResult r = evaluate(owned, predictions, EvalConfig{});
        return r.miou;
    };
}

} // namespace osc
