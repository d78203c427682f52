#include "oscpipe/analytics.hpp"

#include "oscpipe/error.hpp"

#include <algorithm>
#include <cmath>

namespace osc {

PhaseDurations phase_durations(const ClipRecord& clip) {
    PhaseDurations d;
    for (const GroundTruthFrame& gt : clip.ground_truth) {
        const bool act = !mask_empty(gt.actionable);
        const bool trf = !mask_empty(gt.transformed);
        if (act) ++d.actionable_frames;
        if (trf) ++d.transformed_frames;
        if (act && trf) ++d.overlap_frames;
    }
    return d;
}

namespace {

AreaStat stat_of(const std::vector<double>& values) {
    AreaStat s;
    s.samples = static_cast<std::int64_t>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(values.size()));
    return s;
}

ProfileBin bin_of(const std::vector<double>& values) {
    const AreaStat s = stat_of(values);
    return ProfileBin{s.mean, s.stddev, s.samples};
}

} // namespace

std::map<std::string, VerbAreaStats> area_stats(std::span<const ClipRecord> clips) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> areas;
    for (const ClipRecord& clip : clips) {
        auto& [act_areas, trf_areas] = areas[clip.osc.verb];
        for (const GroundTruthFrame& gt : clip.ground_truth) {
            const auto act = mask_area(gt.actionable);
            const auto trf = mask_area(gt.transformed);
            if (act > 0) act_areas.push_back(static_cast<double>(act));
            if (trf > 0) trf_areas.push_back(static_cast<double>(trf));
        }
    }
    std::map<std::string, VerbAreaStats> out;
    for (const auto& [verb, pair] : areas)
        out[verb] = VerbAreaStats{stat_of(pair.first), stat_of(pair.second)};
    return out;
}

std::map<std::string, VerbProfile> progression_profile(std::span<const ClipRecord> clips,
                                                       int bins) {
    if (bins < 1) throw Error("progression profile needs bins >= 1");
    std::map<std::string, std::vector<std::pair<std::vector<double>, std::vector<double>>>>
        samples; // verb -> per-bin (act, trf) area samples
    for (const ClipRecord& clip : clips) {
        auto& verb_bins = samples[clip.osc.verb];
        verb_bins.resize(static_cast<std::size_t>(bins));
        const auto T = static_cast<std::int64_t>(clip.frame_count);
        for (const GroundTruthFrame& gt : clip.ground_truth) {
            const auto bin = std::min<std::int64_t>(
                bins - 1, static_cast<std::int64_t>(bins) * gt.frame_index / T);
            auto& [act_samples, trf_samples] = verb_bins[static_cast<std::size_t>(bin)];
            act_samples.push_back(static_cast<double>(mask_area(gt.actionable)));
            trf_samples.push_back(static_cast<double>(mask_area(gt.transformed)));
        }
    }
    std::map<std::string, VerbProfile> out;
    for (const auto& [verb, verb_bins] : samples) {
        VerbProfile profile;
        profile.actionable.reserve(verb_bins.size());
        profile.transformed.reserve(verb_bins.size());
        for (const auto& [act_samples, trf_samples] : verb_bins) {
            profile.actionable.push_back(bin_of(act_samples));
            profile.transformed.push_back(bin_of(trf_samples));
        }
        out[verb] = std::move(profile);
    }
    return out;
}

} // namespace osc
