#include "oscpipe/model.hpp"

#include "oscpipe/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace osc {

namespace detail {

std::string locate(const std::string& file, const std::string& clip,
                   const std::string& track, int frame, const std::string& message) {
    std::string out;
    if (!file.empty()) out += file + ": ";
    if (!clip.empty()) out += "clip '" + clip + "': ";
    if (!track.empty()) out += "track '" + track + "': ";
    if (frame >= 0) out += "frame " + std::to_string(frame) + ": ";
    return out + message;
}

} // namespace detail

void fail_located(const std::string& file, const std::string& clip,
                  const std::string& track, int frame, const std::string& message) {
    throw ValidationError(detail::locate(file, clip, track, frame, message));
}

const char* to_string(StateLabel label) {
    switch (label) {
        case StateLabel::Actionable: return "actionable";
        case StateLabel::Transformed: return "transformed";
        case StateLabel::Ambiguous: return "ambiguous";
        case StateLabel::Background: return "background";
    }
    return "?";
}

const char* to_string(FramePhase phase) {
    switch (phase) {
        case FramePhase::Initial: return "initial";
        case FramePhase::Transition: return "transition";
        case FramePhase::End: return "end";
        case FramePhase::Unlabeled: return "unlabeled";
    }
    return "?";
}

const char* to_string(SplitTag tag) {
    switch (tag) {
        case SplitTag::Seen: return "seen";
        case SplitTag::Novel: return "novel";
        case SplitTag::Unlabeled: return "unlabeled";
    }
    return "?";
}

StateLabel state_label_from_string(const std::string& token) {
    if (token == "actionable") return StateLabel::Actionable;
    if (token == "transformed") return StateLabel::Transformed;
    if (token == "ambiguous") return StateLabel::Ambiguous;
    if (token == "background") return StateLabel::Background;
    throw ValidationError("unknown state label '" + token + "'");
}

FramePhase frame_phase_from_string(const std::string& token) {
    if (token == "initial") return FramePhase::Initial;
    if (token == "transition") return FramePhase::Transition;
    if (token == "end") return FramePhase::End;
    if (token == "unlabeled") return FramePhase::Unlabeled;
    throw ValidationError("unknown frame phase '" + token + "'");
}

SplitTag split_tag_from_string(const std::string& token) {
    if (token == "seen") return SplitTag::Seen;
    if (token == "novel") return SplitTag::Novel;
    if (token == "unlabeled") return SplitTag::Unlabeled;
    throw ValidationError("unknown split tag '" + token + "'");
}

Masklet make_masklet(std::string track_id, std::vector<MaskRegion> regions) {
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const auto& region = regions[i];
        if (i > 0 && regions[i - 1].frame_index >= region.frame_index)
            fail_located("", "", track_id, region.frame_index,
                         "masklet frame indices must be strictly increasing");
        validate_mask(region.mask);
        if (mask_empty(region.mask))
            fail_located("", "", track_id, region.frame_index, "region mask is empty");
        if (region.mask.height != regions.front().mask.height ||
            region.mask.width != regions.front().mask.width)
            fail_located("", "", track_id, region.frame_index,
                         "masklet masks must share one grid");
    }
    Masklet m;
    m.track_id = std::move(track_id);
    m.regions = std::move(regions);
    return m;
}

const GroundTruthFrame* ClipRecord::gt_at(int frame_index) const {
    const auto it = std::lower_bound(
        ground_truth.begin(), ground_truth.end(), frame_index,
        [](const GroundTruthFrame& g, int f) { return g.frame_index < f; });
    if (it != ground_truth.end() && it->frame_index == frame_index) return &*it;
    return nullptr;
}

std::vector<int> index_set(const LabelSequence& seq, StateLabel c) {
    std::vector<int> out;
    for (const auto& [frame, label] : seq.labels)
        if (label == c) out.push_back(frame);
    return out; // std::map iteration is already ascending
}

void validate_clip(const ClipRecord& clip, const std::string& file) {
    if (clip.clip_id.empty())
        fail_located(file, "", "", -1, "clip_id must be nonempty");
    if (clip.frame_count <= 0)
        fail_located(file, clip.clip_id, "", -1, "frame_count must be positive");
    if (!(clip.fps > 0.0) || !std::isfinite(clip.fps))
        fail_located(file, clip.clip_id, "", -1, "fps must be positive and finite");
    if (clip.height <= 0 || clip.width <= 0)
        fail_located(file, clip.clip_id, "", -1, "grid dimensions must be positive");
    if (!clip.frame_phases.empty() &&
        static_cast<int>(clip.frame_phases.size()) != clip.frame_count)
        fail_located(file, clip.clip_id, "", -1,
                     "frame_phases length must equal frame_count");
    if (clip.osc.verb.empty() || clip.osc.noun.empty() || clip.osc.prompt_act.empty() ||
        clip.osc.prompt_trf.empty())
        fail_located(file, clip.clip_id, "", -1, "osc descriptor fields must be nonempty");
    if (clip.text_embeddings) {
        const auto& te = *clip.text_embeddings;
        if (te.act.empty() || te.act.size() != te.trf.size())
            fail_located(file, clip.clip_id, "", -1,
                         "text embeddings must be nonempty and of equal dimension");
        for (const double v : te.act)
            if (!std::isfinite(v))
                fail_located(file, clip.clip_id, "", -1, "text embedding entry not finite");
        for (const double v : te.trf)
            if (!std::isfinite(v))
                fail_located(file, clip.clip_id, "", -1, "text embedding entry not finite");
    }

    std::set<std::string> track_ids;
    for (const auto& masklet : clip.masklets) {
        if (!track_ids.insert(masklet.track_id).second)
            fail_located(file, clip.clip_id, masklet.track_id, -1,
                         "duplicate track_id within clip");
        int previous_frame = -1;
        for (const auto& region : masklet.regions) {
            const auto loc_frame = region.frame_index;
            if (region.frame_index < 0 || region.frame_index >= clip.frame_count)
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                             "frame_index out of range [0, " +
                                 std::to_string(clip.frame_count) + ")");
            if (region.frame_index <= previous_frame)
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                             "masklet frame indices must be strictly increasing");
            previous_frame = region.frame_index;
            try {
                validate_mask(region.mask);
            } catch (const ValidationError& e) {
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame, e.what());
            }
            if (region.mask.height != clip.height || region.mask.width != clip.width)
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                             "mask grid does not match clip grid");
            if (mask_empty(region.mask))
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                             "region mask is empty");
            if (region.scores &&
                (!std::isfinite(region.scores->act) || !std::isfinite(region.scores->trf)))
                fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                             "similarity scores must be finite");
            if (region.embedding) {
                for (const double v : *region.embedding)
                    if (!std::isfinite(v))
                        fail_located(file, clip.clip_id, masklet.track_id, loc_frame,
                                     "embedding entry not finite");
            }
        }
    }

    int previous_gt = -1;
    for (const auto& gt : clip.ground_truth) {
        const int f = gt.frame_index;
        if (f < 0 || f >= clip.frame_count)
            fail_located(file, clip.clip_id, "", f, "ground-truth frame_index out of range");
        if (f <= previous_gt)
            fail_located(file, clip.clip_id, "", f,
                         "ground-truth frames must be strictly increasing");
        previous_gt = f;
        try {
            validate_mask(gt.actionable);
            validate_mask(gt.transformed);
        } catch (const ValidationError& e) {
            fail_located(file, clip.clip_id, "", f, e.what());
        }
        if (gt.actionable.height != clip.height || gt.actionable.width != clip.width ||
            gt.transformed.height != clip.height || gt.transformed.width != clip.width)
            fail_located(file, clip.clip_id, "", f,
                         "ground-truth mask grid does not match clip grid");
        if (intersection_area(gt.actionable, gt.transformed) != 0)
            fail_located(file, clip.clip_id, "", f,
                         "ground-truth actionable and transformed masks overlap");
    }
}

} // namespace osc
