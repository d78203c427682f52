#include "oscpipe/dynamics.hpp"
#include "oscpipe/rng.hpp"

#include <benchmark/benchmark.h>

using namespace osc;

namespace {

LabelSequence noisy_sequence(int length, std::uint64_t seed) {
    Rng rng(seed);
    LabelSequence seq;
    seq.track_id = "t0";
    for (int t = 0; t < length; ++t) {
        const int change = length / 2;
        StateLabel label = t < change ? StateLabel::Actionable : StateLabel::Transformed;
        if (rng.bernoulli(0.2))
            label = label == StateLabel::Actionable ? StateLabel::Transformed
                                                    : StateLabel::Actionable;
        if (rng.bernoulli(0.1)) label = StateLabel::Ambiguous;
        seq.labels[t] = label;
    }
    return seq;
}

} // namespace

static void BM_CausalOrdering(benchmark::State& state) {
    const LabelSequence seq = noisy_sequence(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(causal_ordering(seq));
}
BENCHMARK(BM_CausalOrdering)->Arg(50)->Arg(500);

static void BM_RefineSequence(benchmark::State& state) {
    const LabelSequence seq = noisy_sequence(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(refine_sequence(seq));
}
BENCHMARK(BM_RefineSequence)->Arg(50)->Arg(500);
