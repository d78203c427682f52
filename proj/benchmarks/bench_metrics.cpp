#include "oscpipe/labeling.hpp"
#include "oscpipe/metrics.hpp"
#include "oscpipe/progress.hpp"
#include "oscpipe/rng.hpp"
#include "oscpipe/synth.hpp"

#include <benchmark/benchmark.h>

using namespace osc;

namespace {

SynthCorpus bench_corpus() {
    SynthConfig cfg;
    cfg.seed = 9;
    cfg.clips = 8;
    cfg.frames_per_clip = 30;
    cfg.masklets_per_clip = 6;
    cfg.grid_height = 64;
    cfg.grid_width = 64;
    cfg.noise_flip_prob = 0.2;
    cfg.ambiguous_prob = 0.1;
    return generate_corpus(cfg);
}

} // namespace

static void BM_PseudoLabelClip(benchmark::State& state) {
    const SynthCorpus corpus = bench_corpus();
    for (auto _ : state)
        for (const ClipRecord& clip : corpus.clips)
            benchmark::DoNotOptimize(pseudo_label_clip(clip, ThresholdConfig{}));
}
BENCHMARK(BM_PseudoLabelClip);

static void BM_CompositePrediction(benchmark::State& state) {
    const SynthCorpus corpus = bench_corpus();
    std::vector<LabelMap> labels;
    for (const ClipRecord& clip : corpus.clips)
        labels.push_back(pseudo_label_clip(clip, ThresholdConfig{}));
    for (auto _ : state)
        for (std::size_t i = 0; i < corpus.clips.size(); ++i)
            benchmark::DoNotOptimize(composite_prediction(corpus.clips[i], labels[i]));
}
BENCHMARK(BM_CompositePrediction);

static void BM_KendallTau(benchmark::State& state) {
    Rng rng(10);
    ProgressCurve curve;
    for (int t = 0; t < state.range(0); ++t) {
        curve.values.emplace_back(rng.uniform01());
        curve.phases.push_back(FramePhase::Unlabeled);
    }
    for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(curve));
}
BENCHMARK(BM_KendallTau)->Arg(200)->Arg(2000);
