#pragma once

#include "oscpipe/metrics.hpp"
#include "oscpipe/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace osc {

enum class Stage { Synth, Label, Refine, Eval, Progress, Analyze, GridSearch };

const char* to_string(Stage stage);
Stage stage_from_string(const std::string& token);

/// One configuration drives any subset of stages. Only the semantic fields
/// feed the config hash embedded in artifacts; out_dir and jobs are
/// execution knobs and never change a written byte.
struct PipelineConfig {
    std::vector<Stage> stages;

    std::filesystem::path manifest; // dataset input; empty = the synth stage artifact
    std::filesystem::path out_dir;  // empty = $OSCPIPE_OUT, then "out"
    int jobs = 1;
    std::filesystem::path thresholds; // threshold table; empty = manifest's, then defaults
    std::string verb;                 // restrict the corpus to one verb
    std::filesystem::path labels_in;  // labels input; empty = this run's artifacts

    SynthConfig synth; // synth stage parameters; synth.seed is the global seed

    // refine
    bool refine_report = false;

    // eval
    SplitFilter split = SplitFilter::Full;
    bool fuse_states = false;
    bool per_verb = false;
    bool oracle = false;

    // progress
    bool progress_from_gt = false;

    // analyze
    int bins = 10;

    // gridsearch candidate axes (cross product)
    std::vector<double> taus{0.5};
    std::vector<double> deltas{0.01};
};

struct PipelineResult {
    std::vector<std::filesystem::path> artifacts;
    std::vector<std::string> messages; // human-readable summaries for the CLI
};

std::filesystem::path resolve_out_dir(const PipelineConfig& cfg);

/// Hash of the semantic configuration (not paths, jobs, or out dir).
std::string pipeline_config_hash(const PipelineConfig& cfg);

/// Runs the requested stages in pipeline order. Every stage writes its
/// artifacts under out_dir; a stage whose input artifact is absent throws
/// DependencyError naming the missing file.
PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace osc
