#pragma once

#include "oscpipe/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osc {

/// Similarity thresholds: tau separates object states from background
/// (sum test), delta separates the two states from each other (gap test).
/// Defaults are the aggregate tuned values.
struct ThresholdConfig {
    double tau = 0.5;
    double delta = 0.01;
};

/// Per-verb threshold table with a global fallback.
struct ThresholdTable {
    ThresholdConfig fallback;
    std::map<std::string, ThresholdConfig> per_verb;

    ThresholdConfig for_verb(const std::string& verb) const {
        const auto it = per_verb.find(verb);
        return it == per_verb.end() ? fallback : it->second;
    }
};

/// Dot products of a vision embedding against the two state-text embeddings.
SimilarityPair compute_similarity(std::span<const double> vision,
                                  const TextEmbeddings& text);

/// The four-way threshold rule, applied in fixed order: background first
/// (sum below tau), then ambiguous (gap below delta), then whichever state
/// strictly wins. An exact tie that slips past a zero delta is Ambiguous,
/// so the mapping is total.
StateLabel threshold_label(SimilarityPair scores, ThresholdConfig cfg);

/// Labels every region of every masklet independently. Precomputed scores
/// win over embeddings when both are present; a region with neither (or an
/// embedding but no clip-level text embeddings) raises an error naming the
/// track and frame.
LabelMap pseudo_label_clip(const ClipRecord& clip, ThresholdConfig cfg);
LabelMap pseudo_label_clip(const ClipRecord& clip, const ThresholdTable& table);

struct GridCell {
    ThresholdConfig config;
    std::optional<double> miou; // absent when no frame produced a defined IoU
};

struct GridSearchResult {
    std::map<std::string, ThresholdConfig> best_per_verb;
    std::map<std::string, std::vector<GridCell>> grid_per_verb; // candidate order
};

/// Scores one candidate config over the clips of a single verb.
using GridEvaluator = std::function<std::optional<double>(
    std::span<const ClipRecord* const>, ThresholdConfig)>;

/// Exhaustive per-verb search over the candidate list. Argmax of mIoU;
/// ties (including undefined-vs-undefined) break toward lower tau, then
/// lower delta, so the result is independent of candidate order.
GridSearchResult grid_search_thresholds(std::span<const ThresholdConfig> candidates,
                                        std::span<const ClipRecord> dev_clips,
                                        const GridEvaluator& evaluate_miou);

/// Default evaluator: pseudo-label with the candidate config, rasterize,
/// and score mIoU against ground truth on the full split.
GridEvaluator default_grid_evaluator();

} // namespace osc
