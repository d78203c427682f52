#include "oscpipe/mask.hpp"
#include "oscpipe/rng.hpp"

#include <benchmark/benchmark.h>

using namespace osc;

namespace {

Bitmap noisy_grid(int size, double density, std::uint64_t seed) {
    Rng rng(seed);
    Bitmap grid = make_bitmap(size, size);
    for (auto& px : grid.data) px = rng.bernoulli(density) ? 1 : 0;
    return grid;
}

} // namespace

static void BM_RleEncode(benchmark::State& state) {
    const Bitmap grid = noisy_grid(static_cast<int>(state.range(0)), 0.4, 1);
    for (auto _ : state) benchmark::DoNotOptimize(rle_encode(grid));
}
BENCHMARK(BM_RleEncode)->Arg(64)->Arg(256);

static void BM_RleDecode(benchmark::State& state) {
    const PixelMask mask = rle_encode(noisy_grid(static_cast<int>(state.range(0)), 0.4, 1));
    for (auto _ : state) benchmark::DoNotOptimize(rle_decode(mask));
}
BENCHMARK(BM_RleDecode)->Arg(64)->Arg(256);

static void BM_MaskUnion(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const PixelMask a = rle_encode(noisy_grid(size, 0.4, 1));
    const PixelMask b = rle_encode(noisy_grid(size, 0.4, 2));
    for (auto _ : state) benchmark::DoNotOptimize(mask_union(a, b));
}
BENCHMARK(BM_MaskUnion)->Arg(64)->Arg(256);

static void BM_IntersectionArea(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const PixelMask a = rle_encode(noisy_grid(size, 0.4, 1));
    const PixelMask b = rle_encode(noisy_grid(size, 0.4, 2));
    for (auto _ : state) benchmark::DoNotOptimize(intersection_area(a, b));
}
BENCHMARK(BM_IntersectionArea)->Arg(64)->Arg(256);
