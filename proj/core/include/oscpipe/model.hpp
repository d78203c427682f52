#pragma once

#include "oscpipe/mask.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace osc {

/// Per-region object-state label. Ambiguous is pipeline-internal: it never
/// reaches evaluation as a class and contributes no mask downstream.
enum class StateLabel { Actionable, Transformed, Ambiguous, Background };

/// Coarse frame phase from the ground-truth annotation timeline.
enum class FramePhase { Initial, Transition, End, Unlabeled };

enum class SplitTag { Seen, Novel, Unlabeled };

const char* to_string(StateLabel label);
const char* to_string(FramePhase phase);
const char* to_string(SplitTag tag);
StateLabel state_label_from_string(const std::string& token);
FramePhase frame_phase_from_string(const std::string& token);
SplitTag split_tag_from_string(const std::string& token);

/// Vision-text similarity for the two state descriptions of one region.
struct SimilarityPair {
    double act = 0.0;
    double trf = 0.0;
};

/// One object state change: verb/noun plus the two state-description prompts
/// the scores were computed against.
struct OscDescriptor {
    std::string verb;
    std::string noun;
    std::string prompt_act;
    std::string prompt_trf;
};

/// Text embeddings for the two state descriptions, used to score regions
/// that carry a raw vision embedding instead of precomputed scores.
struct TextEmbeddings {
    std::vector<double> act;
    std::vector<double> trf;
};

/// One tracked object-region observation in one frame.
struct MaskRegion {
    int frame_index = 0;
    PixelMask mask;
    std::optional<SimilarityPair> scores;
    std::optional<std::vector<double>> embedding;
    std::optional<std::array<double, 4>> bbox;
};

/// The time-indexed track of one region proposal. Frame indices are strictly
/// increasing and all masks share one grid; construct via make_masklet.
struct Masklet {
    std::string track_id;
    std::vector<MaskRegion> regions;
};

/// Validates ordering, nonempty masks, and uniform mask dimensions.
Masklet make_masklet(std::string track_id, std::vector<MaskRegion> regions);

/// Human annotation for one frame: disjoint actionable/transformed masks.
/// Ignored frames carry annotations but are skipped by every metric.
struct GroundTruthFrame {
    int frame_index = 0;
    PixelMask actionable;
    PixelMask transformed;
    bool ignored = false;
};

/// One video clip: descriptor, frame/grid geometry, tracked masklets, and
/// optional ground truth. Frames exist only as indices; no pixels here.
struct ClipRecord {
    std::string clip_id;
    OscDescriptor osc;
    int frame_count = 0; // T
    double fps = 1.0;
    int height = 0;
    int width = 0;
    std::vector<FramePhase> frame_phases; // length T (all Unlabeled if unknown)
    std::vector<Masklet> masklets;
    SplitTag split = SplitTag::Unlabeled;
    std::vector<GroundTruthFrame> ground_truth; // sorted by frame_index; may be empty
    std::optional<TextEmbeddings> text_embeddings;
    std::optional<int> detection_cadence; // frames between detector runs (metadata)

    bool has_ground_truth() const { return !ground_truth.empty(); }
    const GroundTruthFrame* gt_at(int frame_index) const;
};

/// Per-masklet time series of state labels; keys equal the masklet's frame
/// indices.
struct LabelSequence {
    std::string track_id;
    std::map<int, StateLabel> labels;
};

/// Sorted frame indices of one label class (the index set S_c for a track).
std::vector<int> index_set(const LabelSequence& seq, StateLabel c);

using LabelMap = std::map<std::string, LabelSequence>;  // track_id -> sequence
using CorpusLabels = std::map<std::string, LabelMap>;   // clip_id -> label map
using Corpus = std::vector<ClipRecord>;

/// Full structural validation: mask invariants, masklet ordering, frame
/// bounds, unique track ids, GT disjointness and dimensions. Errors carry
/// clip/track/frame coordinates. `file` is prepended when nonempty.
void validate_clip(const ClipRecord& clip, const std::string& file = "");

} // namespace osc
