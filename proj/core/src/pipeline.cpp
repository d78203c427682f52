#include "oscpipe/pipeline.hpp"

#include "oscpipe/analytics.hpp"
#include "oscpipe/dynamics.hpp"
#include "oscpipe/error.hpp"
#include "oscpipe/io.hpp"
#include "oscpipe/labeling.hpp"
#include "oscpipe/parallel.hpp"
#include "oscpipe/progress.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>

namespace osc {

using nlohmann::json;

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::Synth: return "synth";
        case Stage::Label: return "label";
        case Stage::Refine: return "refine";
        case Stage::Eval: return "eval";
        case Stage::Progress: return "progress";
        case Stage::Analyze: return "analyze";
        case Stage::GridSearch: return "gridsearch";
    }
    return "?";
}

Stage stage_from_string(const std::string& token) {
    if (token == "synth") return Stage::Synth;
    if (token == "label") return Stage::Label;
    if (token == "refine") return Stage::Refine;
    if (token == "eval") return Stage::Eval;
    if (token == "progress") return Stage::Progress;
    if (token == "analyze") return Stage::Analyze;
    if (token == "gridsearch") return Stage::GridSearch;
    throw Error("unknown stage '" + token + "'");
}

std::filesystem::path resolve_out_dir(const PipelineConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("OSCPIPE_OUT"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path("out");
}

std::string pipeline_config_hash(const PipelineConfig& cfg) {
    json j;
    json stages = json::array();
    for (const Stage s : cfg.stages) stages.push_back(to_string(s));
    j["stages"] = std::move(stages);
    j["verb"] = cfg.verb;
    j["synth"] = {{"seed", cfg.synth.seed},
                  {"clips", cfg.synth.clips},
                  {"frames_per_clip", cfg.synth.frames_per_clip},
                  {"masklets_per_clip", cfg.synth.masklets_per_clip},
                  {"grid", {cfg.synth.grid_height, cfg.synth.grid_width}},
                  {"window", {cfg.synth.window_lo, cfg.synth.window_hi}},
                  {"noise_flip_prob", cfg.synth.noise_flip_prob},
                  {"ambiguous_prob", cfg.synth.ambiguous_prob},
                  {"score_margin", cfg.synth.score_margin}};
    j["refine_report"] = cfg.refine_report;
    j["split"] = to_string(cfg.split);
    j["fuse_states"] = cfg.fuse_states;
    j["per_verb"] = cfg.per_verb;
    j["oracle"] = cfg.oracle;
    j["progress_from_gt"] = cfg.progress_from_gt;
    j["bins"] = cfg.bins;
    j["taus"] = cfg.taus;
    j["deltas"] = cfg.deltas;
    // threshold values (not the path) are semantic input
    if (!cfg.thresholds.empty() && std::filesystem::exists(cfg.thresholds)) {
        const ThresholdTable table = load_thresholds(cfg.thresholds);
        json per_verb = json::object();
        for (const auto& [verb, tc] : table.per_verb) per_verb[verb] = {tc.tau, tc.delta};
        j["thresholds"] = {{"default", {table.fallback.tau, table.fallback.delta}},
                           {"per_verb", std::move(per_verb)}};
    }
    return config_hash_hex(j.dump());
}

namespace {

std::string field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

// Shared state threaded through the stages of one run.
struct Runtime {
    const PipelineConfig& cfg;
    std::filesystem::path out;
    std::string hash;
    PipelineResult result;

    std::optional<Corpus> corpus;
    std::optional<CorpusLabels> labels;          // current label artifact, in memory
    std::filesystem::path labels_artifact;       // path the current labels live at

    std::filesystem::path dataset_dir() const { return out / "dataset"; }

    std::filesystem::path manifest_path() const {
        return cfg.manifest.empty() ? dataset_dir() / "manifest.json" : cfg.manifest;
    }

    const Corpus& load_corpus() {
        if (corpus) return *corpus;
        const auto path = manifest_path();
        if (!std::filesystem::exists(path))
            throw DependencyError("no dataset manifest at " + path.string() +
                                  " (pass --manifest or run the synth stage first)");
        Corpus loaded = load_dataset(path);
        if (!cfg.verb.empty()) {
            std::erase_if(loaded,
                          [&](const ClipRecord& c) { return c.osc.verb != cfg.verb; });
        }
        corpus = std::move(loaded);
        return *corpus;
    }

    ThresholdTable load_threshold_table() {
        if (!cfg.thresholds.empty()) {
            if (!std::filesystem::exists(cfg.thresholds))
                throw DependencyError("thresholds file not found: " +
                                      cfg.thresholds.string());
            return load_thresholds(cfg.thresholds);
        }
        const auto path = manifest_path();
        if (std::filesystem::exists(path)) {
            const DatasetManifest manifest = load_manifest(path);
            if (manifest.thresholds_file) {
                const auto tp = path.parent_path() / *manifest.thresholds_file;
                if (!std::filesystem::exists(tp))
                    throw DependencyError("manifest thresholds file not found: " +
                                          tp.string());
                return load_thresholds(tp);
            }
        }
        return ThresholdTable{}; // aggregate defaults, no per-verb entries
    }

    const CorpusLabels& require_labels(const char* stage) {
        if (labels) return *labels;
        std::filesystem::path path = cfg.labels_in;
        if (path.empty()) {
            const auto refined = out / "labels_refined.json";
            const auto raw = out / "labels.json";
            if (std::filesystem::exists(refined)) path = refined;
            else if (std::filesystem::exists(raw)) path = raw;
            else
                throw DependencyError(std::string("stage '") + stage +
                                      "' requires a labels artifact; missing " +
                                      raw.string() +
                                      " (run 'label' first or pass --labels)");
        } else if (!std::filesystem::exists(path)) {
            throw DependencyError(std::string("stage '") + stage +
                                  "' requires labels; file not found: " + path.string());
        }
        CorpusLabels loaded = load_labels(path);
        // refine can run on a standalone label file; validate whenever the
        // dataset is actually available
        if (corpus || std::filesystem::exists(manifest_path()))
            validate_labels(loaded, load_corpus(), path.string());
        labels = std::move(loaded);
        labels_artifact = path;
        return *labels;
    }

    void add_artifact(const std::filesystem::path& p) { result.artifacts.push_back(p); }
};

CorpusPredictions predictions_for(const Corpus& corpus, const CorpusLabels& labels,
                                  int jobs, bool oracle, double theta) {
    std::vector<const ClipRecord*> targets;
    for (const ClipRecord& clip : corpus)
        if (oracle ? clip.has_ground_truth() : labels.count(clip.clip_id))
            targets.push_back(&clip);
    std::vector<ClipPredictions> slots(targets.size());
    parallel_for(targets.size(), jobs, [&](std::size_t i) {
        const ClipRecord& clip = *targets[i];
        const LabelMap map =
            oracle ? oracle_labels(clip, theta) : labels.at(clip.clip_id);
        slots[i] = composite_prediction(clip, map);
    });
    CorpusPredictions preds;
    for (std::size_t i = 0; i < targets.size(); ++i)
        preds[targets[i]->clip_id] = std::move(slots[i]);
    return preds;
}

void run_synth(Runtime& rt) {
    const SynthCorpus synth = generate_corpus(rt.cfg.synth);
    DatasetManifest meta;
    meta.config_hash = rt.hash;
    meta.score_convention = "synthetic";
    meta.rng = "mt19937_64/splitmix64";
    meta.seed = rt.cfg.synth.seed;
    const auto manifest = save_dataset(synth.clips, rt.dataset_dir(), meta);
    const auto truth_path = rt.dataset_dir() / "truth_labels.json";
    save_labels(synth.truth, truth_path, rt.hash);
    rt.add_artifact(manifest);
    rt.add_artifact(truth_path);
    rt.result.messages.push_back("synth: " + std::to_string(synth.clips.size()) +
                                 " clips -> " + rt.dataset_dir().string());
    Corpus generated = std::move(synth.clips); // later stages read the in-memory copy
    if (!rt.cfg.verb.empty())
        std::erase_if(generated,
                      [&](const ClipRecord& c) { return c.osc.verb != rt.cfg.verb; });
    rt.corpus = std::move(generated);
}

void run_label(Runtime& rt) {
    const Corpus& corpus = rt.load_corpus();
    const ThresholdTable table = rt.load_threshold_table();
    std::vector<LabelMap> slots(corpus.size());
    parallel_for(corpus.size(), rt.cfg.jobs,
                 [&](std::size_t i) { slots[i] = pseudo_label_clip(corpus[i], table); });
    CorpusLabels labels;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        labels[corpus[i].clip_id] = std::move(slots[i]);
    const auto path = rt.out / "labels.json";
    save_labels(labels, path, rt.hash);
    rt.add_artifact(path);
    rt.result.messages.push_back("label: " + std::to_string(labels.size()) + " clips -> " +
                                 path.string());
    rt.labels = std::move(labels);
    rt.labels_artifact = path;
}

void run_refine(Runtime& rt) {
    const CorpusLabels& input = rt.require_labels("refine");
    std::vector<std::pair<std::string, const LabelMap*>> items;
    for (const auto& [clip_id, map] : input) items.emplace_back(clip_id, &map);
    std::vector<std::pair<LabelMap, RefinementReport>> slots(items.size());
    parallel_for(items.size(), rt.cfg.jobs,
                 [&](std::size_t i) { slots[i] = refine_clip(*items[i].second); });

    CorpusLabels refined;
    RefinementReport total;
    std::string report_csv;
    for (std::size_t i = 0; i < items.size(); ++i) {
        refined[items[i].first] = std::move(slots[i].first);
        total += slots[i].second;
        const auto& r = slots[i].second;
        report_csv += items[i].first + "," + std::to_string(r.flips_causal) + "," +
                      std::to_string(r.resolved_ambiguous) + "," +
                      std::to_string(r.iterations) + "\n";
    }
    const auto path = rt.out / "labels_refined.json";
    save_labels(refined, path, rt.hash);
    rt.add_artifact(path);
    if (rt.cfg.refine_report) {
        const auto report_path = rt.out / "refine_report.csv";
        write_text_file(report_path,
                        csv_preamble(rt.hash, {},
                                     "clip_id,flips_causal,resolved_ambiguous,iterations") +
                            report_csv);
        rt.add_artifact(report_path);
    }
    rt.result.messages.push_back(
        "refine: " + std::to_string(total.flips_causal) + " causal flips, " +
        std::to_string(total.resolved_ambiguous) + " ambiguous resolved -> " + path.string());
    rt.labels = std::move(refined);
    rt.labels_artifact = path;
}

void run_eval(Runtime& rt) {
    const Corpus& corpus = rt.load_corpus();
    CorpusPredictions preds;
    if (rt.cfg.oracle) {
        preds = predictions_for(corpus, {}, rt.cfg.jobs, true, 0.5);
    } else {
        preds = predictions_for(corpus, rt.require_labels("eval"), rt.cfg.jobs, false, 0.5);
    }
    EvalConfig ec;
    ec.split = rt.cfg.split;
    ec.fuse_states = rt.cfg.fuse_states;
    const EvalResult r = evaluate(corpus, preds, ec);

    const std::string split = to_string(rt.cfg.split);
    const std::string fused = rt.cfg.fuse_states ? "1" : "0";
    std::string rows = "overall,," + split + "," + fused + "," + field(r.miou) + "," +
                       field(r.miou_act) + "," + field(r.miou_trf) + "," +
                       std::to_string(r.frames_evaluated) + "," +
                       std::to_string(r.frames_ignored) + "\n";
    if (rt.cfg.per_verb) {
        for (const auto& [verb, score] : r.per_verb)
            rows += "verb," + verb + "," + split + "," + fused + "," + field(score.miou) +
                    "," + field(score.miou_act) + "," + field(score.miou_trf) + "," +
                    std::to_string(score.frames_evaluated) + ",\n";
        rows += "verb_mean,," + split + "," + fused + "," + field(r.verb_mean) + ",,,,\n";
    }
    const auto path = rt.out / "eval.csv";
    write_text_file(
        path, csv_preamble(rt.hash, r.notes,
                           "scope,verb,split,fuse_states,miou,miou_act,miou_trf,"
                           "frames_evaluated,frames_ignored") +
                  rows);
    rt.add_artifact(path);

    std::string summary = "eval: split=" + split + (rt.cfg.fuse_states ? " fused" : "") +
                          (rt.cfg.oracle ? " oracle" : "") +
                          " miou=" + (r.miou ? format_double(*r.miou) : "undefined");
    if (r.miou_act) summary += " act=" + format_double(*r.miou_act);
    if (r.miou_trf) summary += " trf=" + format_double(*r.miou_trf);
    summary += " frames=" + std::to_string(r.frames_evaluated) +
               " ignored=" + std::to_string(r.frames_ignored);
    if (rt.cfg.per_verb)
        for (const auto& [verb, score] : r.per_verb)
            summary += "\n  " + verb + ": miou=" +
                       (score.miou ? format_double(*score.miou) : "undefined") +
                       " frames=" + std::to_string(score.frames_evaluated);
    rt.result.messages.push_back(summary);
}

void run_progress(Runtime& rt) {
    const Corpus& corpus = rt.load_corpus();
    ProgressReport report;
    if (rt.cfg.progress_from_gt) {
        std::vector<ClipRecord> with_gt;
        for (const ClipRecord& clip : corpus)
            if (clip.has_ground_truth()) with_gt.push_back(clip);
        report = progress_report_from_gt(with_gt);
    } else {
        const CorpusPredictions preds =
            predictions_for(corpus, rt.require_labels("progress"), rt.cfg.jobs, false, 0.5);
        std::vector<ClipRecord> with_preds;
        for (const ClipRecord& clip : corpus)
            if (preds.count(clip.clip_id)) with_preds.push_back(clip);
        report = progress_report(with_preds, preds);
    }

    std::string curves;
    for (const ClipProgress& cp : report.clips)
        for (std::size_t t = 0; t < cp.curve.values.size(); ++t)
            curves += cp.clip_id + "," + std::to_string(t) + "," +
                      field(cp.curve.values[t]) + "," + to_string(cp.curve.phases[t]) + "\n";
    const auto curves_path = rt.out / "progress_curves.csv";
    write_text_file(curves_path,
                    csv_preamble(rt.hash, {}, "clip_id,frame,value,phase") + curves);
    rt.add_artifact(curves_path);

    std::vector<std::string> notes = report.notes;
    if (!report.undefined_tau_clips.empty()) {
        std::string list = "clips with undefined tau:";
        for (const auto& id : report.undefined_tau_clips) list += " " + id;
        notes.push_back(list);
    }
    if (!report.undefined_end_clips.empty()) {
        std::string list = "clips with undefined end metrics:";
        for (const auto& id : report.undefined_end_clips) list += " " + id;
        notes.push_back(list);
    }
    std::string rows;
    for (const ClipProgress& cp : report.clips)
        rows += "clip," + cp.clip_id + "," + field(cp.metrics.tau) + "," +
                field(cp.metrics.end_sigma) + "," + field(cp.metrics.end_l2) + "\n";
    rows += "aggregate,," + field(report.aggregate.tau) + "," +
            field(report.aggregate.end_sigma) + "," + field(report.aggregate.end_l2) + "\n";
    const auto metrics_path = rt.out / "progress_metrics.csv";
    write_text_file(metrics_path,
                    csv_preamble(rt.hash, notes, "scope,clip_id,tau,end_sigma,end_l2") +
                        rows);
    rt.add_artifact(metrics_path);

    rt.result.messages.push_back(
        "progress: tau=" +
        (report.aggregate.tau ? format_double(*report.aggregate.tau) : "undefined") +
        " end_sigma=" +
        (report.aggregate.end_sigma ? format_double(*report.aggregate.end_sigma)
                                    : "undefined") +
        " end_l2=" +
        (report.aggregate.end_l2 ? format_double(*report.aggregate.end_l2) : "undefined") +
        " over " + std::to_string(report.clips.size()) + " clips");
}

void run_analyze(Runtime& rt) {
    const Corpus& corpus = rt.load_corpus();

    std::string durations;
    for (const ClipRecord& clip : corpus) {
        if (!clip.has_ground_truth()) continue;
        const PhaseDurations d = phase_durations(clip);
        durations += clip.clip_id + "," + clip.osc.verb + "," +
                     std::to_string(d.actionable_frames) + "," +
                     std::to_string(d.transformed_frames) + "," +
                     std::to_string(d.overlap_frames) + "\n";
    }
    const auto durations_path = rt.out / "analytics_phase_durations.csv";
    write_text_file(
        durations_path,
        csv_preamble(rt.hash, {},
                     "clip_id,verb,actionable_frames,transformed_frames,overlap_frames") +
            durations);
    rt.add_artifact(durations_path);

    std::string areas;
    for (const auto& [verb, stats] : area_stats(corpus)) {
        areas += verb + ",actionable," + format_double(stats.actionable.mean) + "," +
                 format_double(stats.actionable.stddev) + "," +
                 std::to_string(stats.actionable.samples) + "\n";
        areas += verb + ",transformed," + format_double(stats.transformed.mean) + "," +
                 format_double(stats.transformed.stddev) + "," +
                 std::to_string(stats.transformed.samples) + "\n";
    }
    const auto areas_path = rt.out / "analytics_area_stats.csv";
    write_text_file(areas_path,
                    csv_preamble(rt.hash, {"population statistics over frames where the "
                                           "class mask is nonempty"},
                                 "verb,class,mean,stddev,samples") +
                        areas);
    rt.add_artifact(areas_path);

    std::string profile_rows;
    for (const auto& [verb, profile] : progression_profile(corpus, rt.cfg.bins)) {
        for (std::size_t b = 0; b < profile.actionable.size(); ++b) {
            const ProfileBin& act = profile.actionable[b];
            const ProfileBin& trf = profile.transformed[b];
            profile_rows += verb + ",actionable," + std::to_string(b) + "," +
                            format_double(act.mean) + "," + format_double(act.stddev) + "," +
                            std::to_string(act.samples) + "\n";
            profile_rows += verb + ",transformed," + std::to_string(b) + "," +
                            format_double(trf.mean) + "," + format_double(trf.stddev) + "," +
                            std::to_string(trf.samples) + "\n";
        }
    }
    const auto profile_path = rt.out / "analytics_progression.csv";
    write_text_file(profile_path,
                    csv_preamble(rt.hash, {"frame t of a T-frame clip lands in bin "
                                           "floor(bins*t/T)"},
                                 "verb,class,bin,mean,stddev,samples") +
                        profile_rows);
    rt.add_artifact(profile_path);

    rt.result.messages.push_back("analyze: wrote phase durations, area stats, progression "
                                 "profiles");
}

void run_gridsearch(Runtime& rt) {
    const Corpus& corpus = rt.load_corpus();
    std::vector<ThresholdConfig> candidates;
    for (const double tau : rt.cfg.taus)
        for (const double delta : rt.cfg.deltas) candidates.push_back({tau, delta});
    const GridSearchResult r =
        grid_search_thresholds(candidates, corpus, default_grid_evaluator());

    std::string rows;
    for (const auto& [verb, grid] : r.grid_per_verb)
        for (const GridCell& cell : grid)
            rows += verb + "," + format_double(cell.config.tau) + "," +
                    format_double(cell.config.delta) + "," + field(cell.miou) + "\n";
    const auto grid_path = rt.out / "gridsearch_grid.csv";
    write_text_file(grid_path, csv_preamble(rt.hash, {}, "verb,tau,delta,miou") + rows);
    rt.add_artifact(grid_path);

    ThresholdTable best;
    best.per_verb = r.best_per_verb;
    const auto best_path = rt.out / "gridsearch_thresholds.json";
    save_thresholds(best, best_path, rt.hash);
    rt.add_artifact(best_path);

    std::string summary = "gridsearch:";
    for (const auto& [verb, cfg] : r.best_per_verb)
        summary += " " + verb + "=(" + format_double(cfg.tau) + "," +
                   format_double(cfg.delta) + ")";
    rt.result.messages.push_back(summary);
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    if (cfg.stages.empty()) throw Error("no pipeline stages requested");
    if (cfg.jobs < 1) throw Error("--jobs must be >= 1");

    Runtime rt{cfg, resolve_out_dir(cfg), pipeline_config_hash(cfg), {}, {}, {}, {}};
    std::filesystem::create_directories(rt.out);

    // fixed pipeline order regardless of how the subset was written
    const Stage order[] = {Stage::Synth,    Stage::Label,   Stage::Refine,   Stage::Eval,
                           Stage::Progress, Stage::Analyze, Stage::GridSearch};
    for (const Stage stage : order) {
        if (std::find(cfg.stages.begin(), cfg.stages.end(), stage) == cfg.stages.end())
            continue;
        switch (stage) {
            case Stage::Synth: run_synth(rt); break;
            case Stage::Label: run_label(rt); break;
            case Stage::Refine: run_refine(rt); break;
            case Stage::Eval: run_eval(rt); break;
            case Stage::Progress: run_progress(rt); break;
            case Stage::Analyze: run_analyze(rt); break;
            case Stage::GridSearch: run_gridsearch(rt); break;
        }
    }
    return std::move(rt.result);
}

} // namespace osc
