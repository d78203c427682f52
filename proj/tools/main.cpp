// oscpipe: object-state-change label pipeline over mask/score datasets.
// Subcommands mirror the pipeline stages; artifacts land under --out
// (default $OSCPIPE_OUT, then ./out).

#include "oscpipe/error.hpp"
#include "oscpipe/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace {

void add_global_options(CLI::App* cmd, osc::PipelineConfig& cfg) {
    cmd->add_option("--manifest", cfg.manifest, "Dataset manifest path");
    cmd->add_option("--out", cfg.out_dir, "Output directory (default $OSCPIPE_OUT, then ./out)");
    cmd->add_option("--jobs", cfg.jobs, "Worker threads; never changes output bytes")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.synth.seed, "Seed for all stochastic stages");
    cmd->add_option("--thresholds", cfg.thresholds, "Threshold table file");
    cmd->add_option("--verb", cfg.verb, "Restrict the corpus to one verb");
    cmd->add_option("--labels", cfg.labels_in, "Labels file to read instead of this run's");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-state-change label pipeline: pseudo-labeling, dynamics "
                 "refinement, segmentation metrics, progress analytics"};
    app.require_subcommand(1);

    osc::PipelineConfig cfg;
    std::string split = "full";

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
    synth->add_option("--clips", cfg.synth.clips, "Clip count")->check(CLI::NonNegativeNumber);
    synth->add_option("--frames", cfg.synth.frames_per_clip, "Frames per clip");
    synth->add_option("--masklets", cfg.synth.masklets_per_clip, "Masklets per clip");
    synth->add_option("--height", cfg.synth.grid_height, "Grid height (pixels)");
    synth->add_option("--width", cfg.synth.grid_width, "Grid width (pixels)");
    synth->add_option("--window-lo", cfg.synth.window_lo, "Change-point window start (fraction)");
    synth->add_option("--window-hi", cfg.synth.window_hi, "Change-point window end (fraction)");
    synth->add_option("--noise-flip", cfg.synth.noise_flip_prob, "Score swap probability");
    synth->add_option("--ambiguous", cfg.synth.ambiguous_prob, "Score collapse probability");
    synth->add_option("--margin", cfg.synth.score_margin, "Planted score margin");

    auto* label = app.add_subcommand("label", "Threshold similarity scores into pseudo-labels");
    auto* refine = app.add_subcommand("refine", "Apply state-change dynamics constraints");
    refine->add_flag("--report", cfg.refine_report, "Also write per-clip refine_report.csv");

    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth (mIoU)");
    eval->add_option("--split", split, "Frame/clip filter")
        ->check(CLI::IsMember({"full", "transition", "seen", "novel"}));
    eval->add_flag("--fuse-states", cfg.fuse_states,
                   "Score a single state-agnostic object mask");
    eval->add_flag("--per-verb", cfg.per_verb, "Emit per-verb rows and their unweighted mean");
    eval->add_flag("--oracle", cfg.oracle,
                   "Upper bound: label proposals from ground-truth overlap");

    auto* progress = app.add_subcommand("progress", "Activity-progress curves and metrics");
    progress->add_flag("--from-gt", cfg.progress_from_gt,
                       "Compute curves from ground-truth masks instead of labels");

    auto* analyze = app.add_subcommand("analyze", "Dataset analytics over ground truth");
    analyze->add_option("--bins", cfg.bins, "Normalized-time bins")->check(CLI::PositiveNumber);

    auto* gridsearch = app.add_subcommand("gridsearch", "Per-verb threshold grid search");
    gridsearch->add_option("--taus", cfg.taus, "Candidate tau values")->delimiter(',');
    gridsearch->add_option("--deltas", cfg.deltas, "Candidate delta values")->delimiter(',');

    for (CLI::App* cmd : {synth, label, refine, eval, progress, analyze, gridsearch})
        add_global_options(cmd, cfg);

    CLI11_PARSE(app, argc, argv);

    const std::pair<CLI::App*, osc::Stage> stage_map[] = {
        {synth, osc::Stage::Synth},         {label, osc::Stage::Label},
        {refine, osc::Stage::Refine},       {eval, osc::Stage::Eval},
        {progress, osc::Stage::Progress},   {analyze, osc::Stage::Analyze},
        {gridsearch, osc::Stage::GridSearch},
    };
    for (const auto& [cmd, stage] : stage_map)
        if (cmd->parsed()) cfg.stages.push_back(stage);
    cfg.split = osc::split_filter_from_string(split);

    try {
        const osc::PipelineResult result = osc::run_pipeline(cfg);
        for (const std::string& message : result.messages)
            std::printf("%s\n", message.c_str());
        for (const auto& artifact : result.artifacts)
            std::printf("wrote %s\n", artifact.string().c_str());
    } catch (const osc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
