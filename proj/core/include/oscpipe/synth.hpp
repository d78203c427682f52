#pragma once

#include "oscpipe/model.hpp"

#include <cstdint>

namespace osc {

/// Controls the synthetic corpus generator. Each masklet gets one change
/// point sampled inside the transition window; labels are Actionable before
/// it and Transformed from it on, with scores planted far enough apart that
/// noise-free labeling recovers them exactly.
struct SynthConfig {
    std::uint64_t seed = 0;
    int clips = 1;
    int frames_per_clip = 12;
    int masklets_per_clip = 3;
    int grid_height = 64;
    int grid_width = 64;
    double window_lo = 0.25; // change points land in [lo*T, hi*T]
    double window_hi = 0.75;
    double noise_flip_prob = 0.0;
    double ambiguous_prob = 0.0;
    double score_margin = 0.3; // gap between winning and losing score
};

void validate_config(const SynthConfig& cfg);

struct SynthCorpus {
    Corpus clips;
    CorpusLabels truth; // planted per-region state labels
};

/// Deterministic given the seed: clip i draws from an engine seeded for
/// (seed, i), so clips may be generated in parallel. Masklets are disjoint
/// vertical strips; ground truth rasterizes the planted labels. Noise
/// probabilities from the config are applied via perturb_scores.
SynthCorpus generate_corpus(const SynthConfig& cfg);

/// Corrupts region scores in place. Independently per region: with
/// flip_prob the score pair is swapped (flipping the threshold winner);
/// with ambiguous_prob both scores collapse to their mean (landing inside
/// any positive state-separation threshold). Deterministic given the seed.
void perturb_scores(Corpus& clips, double flip_prob, double ambiguous_prob,
                    std::uint64_t seed);

/// Fraction of frame indices whose predicted label matches the truth.
/// Ambiguous predictions always count as mismatches. The two maps must
/// cover identical clips, tracks, and frame index sets.
double label_accuracy(const CorpusLabels& predicted, const CorpusLabels& truth);
double label_accuracy(const LabelMap& predicted, const LabelMap& truth);

} // namespace osc
