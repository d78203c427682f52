#include "oscpipe/synth.hpp"

#include "oscpipe/error.hpp"
#include "oscpipe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace osc {

namespace {

constexpr std::uint64_t kGenerateStream = 0x67656e65ULL; // distinct rng streams
constexpr std::uint64_t kPerturbStream = 0x70657274ULL;

constexpr double kScoreBase = 0.4; // winner/loser sit at base +- margin/2

struct VerbEntry {
    const char* verb;
    const char* noun;
    const char* prompt_act;
    const char* prompt_trf;
};

constexpr VerbEntry kVerbPool[] = {
    {"chop", "carrot", "whole carrot", "chopped carrot pieces"},
    {"grate", "cheese", "whole cheese block", "grated cheese"},
    {"mash", "potato", "whole potato", "mashed potato"},
    {"peel", "apple", "unpeeled apple", "peeled apple"},
    {"slice", "onion", "whole onion", "onion slices"},
};

std::string clip_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "synth_%05d", index);
    return buf;
}

} // namespace

void validate_config(const SynthConfig& cfg) {
    if (cfg.clips < 0) throw Error("synth: clips must be >= 0");
    if (cfg.frames_per_clip <= 0) throw Error("synth: frames_per_clip must be positive");
    if (cfg.masklets_per_clip <= 0) throw Error("synth: masklets_per_clip must be positive");
    if (cfg.grid_height <= 0 || cfg.grid_width <= 0)
        throw Error("synth: grid dimensions must be positive");
    if (cfg.grid_width < cfg.masklets_per_clip)
        throw Error("synth: grid too small for requested masklets (" +
                    std::to_string(cfg.masklets_per_clip) + " strips need width >= " +
                    std::to_string(cfg.masklets_per_clip) + ")");
    if (!(cfg.window_lo >= 0.0 && cfg.window_lo <= cfg.window_hi && cfg.window_hi <= 1.0))
        throw Error("synth: transition window must satisfy 0 <= lo <= hi <= 1");
    if (cfg.noise_flip_prob < 0.0 || cfg.noise_flip_prob > 1.0 ||
        cfg.ambiguous_prob < 0.0 || cfg.ambiguous_prob > 1.0)
        throw Error("synth: noise probabilities must lie in [0, 1]");
    if (!(cfg.score_margin > 0.0) || cfg.score_margin / 2.0 + kScoreBase > 1.0)
        throw Error("synth: score_margin must lie in (0, 1.2]");
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
    validate_config(cfg);
    SynthCorpus corpus;
    corpus.clips.reserve(static_cast<std::size_t>(cfg.clips));

    const int T = cfg.frames_per_clip;
    const int K = cfg.masklets_per_clip;
    const double win = kScoreBase + cfg.score_margin / 2.0;
    const double lose = kScoreBase - cfg.score_margin / 2.0;

    for (int c = 0; c < cfg.clips; ++c) {
        Rng rng(derive_seed(cfg.seed, kGenerateStream, static_cast<std::uint64_t>(c)));

        ClipRecord clip;
        clip.clip_id = clip_name(c);
        const VerbEntry& entry = kVerbPool[c % std::size(kVerbPool)];
        clip.osc = {entry.verb, entry.noun, entry.prompt_act, entry.prompt_trf};
        clip.frame_count = T;
        clip.fps = 1.0;
        clip.height = cfg.grid_height;
        clip.width = cfg.grid_width;
        clip.split = c % 2 == 0 ? SplitTag::Seen : SplitTag::Novel;
        clip.detection_cadence = 10;

        // change point per masklet, inside the window (clamped to [0, T])
        const auto lo = static_cast<std::int64_t>(std::ceil(cfg.window_lo * T));
        const auto hi = static_cast<std::int64_t>(std::floor(cfg.window_hi * T));
        std::vector<int> change_points(static_cast<std::size_t>(K));
        for (auto& cp : change_points) {
            const std::int64_t v = lo <= hi ? rng.uniform_int(lo, hi) : lo;
            cp = static_cast<int>(std::clamp<std::int64_t>(v, 0, T));
        }

        // disjoint vertical strips, width W/K with the remainder up front
        std::vector<std::pair<int, int>> strips;
        const int base = cfg.grid_width / K;
        const int extra = cfg.grid_width % K;
        int col = 0;
        for (int k = 0; k < K; ++k) {
            const int w = base + (k < extra ? 1 : 0);
            strips.emplace_back(col, col + w);
            col += w;
        }

        LabelMap truth;
        for (int k = 0; k < K; ++k) {
            const auto [col0, col1] = strips[static_cast<std::size_t>(k)];
            const PixelMask strip =
                rect_mask(cfg.grid_height, cfg.grid_width, 0, col0, cfg.grid_height, col1);
            std::vector<MaskRegion> regions;
            regions.reserve(static_cast<std::size_t>(T));
            LabelSequence truth_seq;
            truth_seq.track_id = "t" + std::to_string(k);
            for (int t = 0; t < T; ++t) {
                const bool actionable = t < change_points[static_cast<std::size_t>(k)];
                MaskRegion region;
                region.frame_index = t;
                region.mask = strip;
                region.scores = actionable ? SimilarityPair{win, lose}
                                           : SimilarityPair{lose, win};
                region.bbox = std::array<double, 4>{static_cast<double>(col0), 0.0,
                                                    static_cast<double>(col1),
                                                    static_cast<double>(cfg.grid_height)};
                regions.push_back(std::move(region));
                truth_seq.labels[t] =
                    actionable ? StateLabel::Actionable : StateLabel::Transformed;
            }
            clip.masklets.push_back(make_masklet(truth_seq.track_id, std::move(regions)));
            truth[truth_seq.track_id] = std::move(truth_seq);
        }

        // frame phases from the change-point envelope
        const int first_change = *std::min_element(change_points.begin(), change_points.end());
        const int last_change = *std::max_element(change_points.begin(), change_points.end());
        clip.frame_phases.resize(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            FramePhase phase = FramePhase::Transition;
            if (t < first_change) phase = FramePhase::Initial;
            else if (t >= last_change) phase = FramePhase::End;
            clip.frame_phases[static_cast<std::size_t>(t)] = phase;
        }

        // ground truth rasterizes the planted labels
        clip.ground_truth.reserve(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            std::vector<std::pair<std::int64_t, std::int64_t>> act_spans, trf_spans;
            for (int r = 0; r < cfg.grid_height; ++r) {
                for (int k = 0; k < K; ++k) {
                    const auto [col0, col1] = strips[static_cast<std::size_t>(k)];
                    auto& spans =
                        t < change_points[static_cast<std::size_t>(k)] ? act_spans : trf_spans;
                    spans.emplace_back(static_cast<std::int64_t>(r) * cfg.grid_width + col0,
                                       static_cast<std::int64_t>(r) * cfg.grid_width + col1);
                }
            }
            GroundTruthFrame gt;
            gt.frame_index = t;
            gt.actionable = mask_from_intervals(cfg.grid_height, cfg.grid_width, act_spans);
            gt.transformed = mask_from_intervals(cfg.grid_height, cfg.grid_width, trf_spans);
            gt.ignored = false;
            clip.ground_truth.push_back(std::move(gt));
        }

        validate_clip(clip);
        corpus.truth[clip.clip_id] = std::move(truth);
        corpus.clips.push_back(std::move(clip));
    }

    if (cfg.noise_flip_prob > 0.0 || cfg.ambiguous_prob > 0.0)
        perturb_scores(corpus.clips, cfg.noise_flip_prob, cfg.ambiguous_prob, cfg.seed);
    return corpus;
}

void perturb_scores(Corpus& clips, double flip_prob, double ambiguous_prob,
                    std::uint64_t seed) {
    if (flip_prob < 0.0 || flip_prob > 1.0 || ambiguous_prob < 0.0 || ambiguous_prob > 1.0)
        throw Error("perturb_scores: probabilities must lie in [0, 1]");
    for (std::size_t c = 0; c < clips.size(); ++c) {
        Rng rng(derive_seed(seed, kPerturbStream, c));
        for (auto& masklet : clips[c].masklets) {
            for (auto& region : masklet.regions) {
                // draws are consumed regardless so corpus structure, not score
                // presence, decides the stream position
                const bool flip = rng.bernoulli(flip_prob);
                const bool collapse = rng.bernoulli(ambiguous_prob);
                if (!region.scores) continue;
                if (flip) std::swap(region.scores->act, region.scores->trf);
                if (collapse) {
                    const double mean = (region.scores->act + region.scores->trf) / 2.0;
                    region.scores->act = mean;
                    region.scores->trf = mean;
                }
            }
        }
    }
}

namespace {

[[noreturn]] void index_mismatch(const std::string& where) {
    throw Error("label_accuracy: index sets differ between predicted and truth (" + where +
                ")");
}

struct MatchCount {
    std::int64_t matched = 0;
    std::int64_t total = 0;
};

MatchCount count_matches(const LabelMap& predicted, const LabelMap& truth) {
    if (predicted.size() != truth.size()) index_mismatch("track count");
    MatchCount count;
    auto pit = predicted.begin();
    for (const auto& [track_id, truth_seq] : truth) {
        if (pit->first != track_id) index_mismatch("track '" + track_id + "'");
        const LabelSequence& pred_seq = pit->second;
        ++pit;
        if (pred_seq.labels.size() != truth_seq.labels.size())
            index_mismatch("track '" + track_id + "' frame count");
        auto pl = pred_seq.labels.begin();
        for (const auto& [frame, truth_label] : truth_seq.labels) {
            if (pl->first != frame)
                index_mismatch("track '" + track_id + "' frame " + std::to_string(frame));
            ++count.total;
            if (pl->second == truth_label && pl->second != StateLabel::Ambiguous)
                ++count.matched;
            ++pl;
        }
    }
    return count;
}

} // namespace

double label_accuracy(const LabelMap& predicted, const LabelMap& truth) {
    const MatchCount count = count_matches(predicted, truth);
    if (count.total == 0) return 1.0;
    return static_cast<double>(count.matched) / static_cast<double>(count.total);
}

double label_accuracy(const CorpusLabels& predicted, const CorpusLabels& truth) {
    if (predicted.size() != truth.size()) index_mismatch("clip count");
    MatchCount count;
    auto pit = predicted.begin();
    for (const auto& [clip_id, truth_map] : truth) {
        if (pit->first != clip_id) index_mismatch("clip '" + clip_id + "'");
        const MatchCount clip_count = count_matches(pit->second, truth_map);
        count.matched += clip_count.matched;
        count.total += clip_count.total;
        ++pit;
    }
    if (count.total == 0) return 1.0;
    return static_cast<double>(count.matched) / static_cast<double>(count.total);
}

} // namespace osc
