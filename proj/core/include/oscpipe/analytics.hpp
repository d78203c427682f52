#pragma once

#include "oscpipe/model.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace osc {

/// Frame counts of the annotated phases: frames where each class's mask is
/// nonempty, plus the frames where both are.
struct PhaseDurations {
    std::int64_t actionable_frames = 0;
    std::int64_t transformed_frames = 0;
    std::int64_t overlap_frames = 0;
};

PhaseDurations phase_durations(const ClipRecord& clip);

struct AreaStat {
    double mean = 0.0;
    double stddev = 0.0; // population
    std::int64_t samples = 0;
};

struct VerbAreaStats {
    AreaStat actionable;
    AreaStat transformed;
};

/// Population mean/std of ground-truth region areas (pixels), over frames
/// where the class mask is nonempty, grouped by verb.
std::map<std::string, VerbAreaStats> area_stats(std::span<const ClipRecord> clips);

struct ProfileBin {
    double mean = 0.0;
    double stddev = 0.0; // population
    std::int64_t samples = 0;
};

struct VerbProfile {
    std::vector<ProfileBin> actionable;
    std::vector<ProfileBin> transformed;
};

/// Class areas against normalized clip time: frame t of a T-frame clip
/// lands in bin floor(bins * t / T), and areas are aggregated per bin
/// across all clips of a verb. With bins == T a single clip reproduces its
/// raw per-frame series.
std::map<std::string, VerbProfile> progression_profile(std::span<const ClipRecord> clips,
                                                       int bins);

} // namespace osc
