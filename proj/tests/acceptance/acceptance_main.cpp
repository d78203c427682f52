// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Every tolerance is pinned in code; the binary exits nonzero if any
// criterion fails.

#include "oscpipe/dynamics.hpp"
#include "oscpipe/error.hpp"
#include "oscpipe/io.hpp"
#include "oscpipe/labeling.hpp"
#include "oscpipe/metrics.hpp"
#include "oscpipe/pipeline.hpp"
#include "oscpipe/progress.hpp"
#include "oscpipe/rng.hpp"
#include "oscpipe/synth.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace osc;

namespace {

struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
    long long budget_ms = 0; // 0 = no stated runtime bound
};

bool expect(bool condition, const std::string& message, std::string& detail) {
    if (!condition && detail.empty()) detail = message;
    return condition;
}

// ---- C1: exhaustive branch agreement with the straight-line threshold rule

bool c1_threshold_branches(std::string& detail) {
    const ThresholdConfig cfg{0.5, 0.01};
    std::map<StateLabel, std::int64_t> hits;
    for (double s_act = -1.0; s_act <= 1.0 + 1e-12; s_act += 0.005) {
        for (double s_trf = -1.0; s_trf <= 1.0 + 1e-12; s_trf += 0.005) {
            const StateLabel actual = threshold_label({s_act, s_trf}, cfg);
            const auto expected = oracles::threshold_chain_reference(s_act, s_trf, cfg.tau, cfg.delta);
            if (!expected.has_value())
                return expect(false, "reference chain left a pair undefined", detail);
            if (actual != *expected) {
                std::ostringstream os;
                os << "disagreement at (" << s_act << ", " << s_trf << ")";
                return expect(false, os.str(), detail);
            }
            ++hits[actual];
        }
    }
    for (const StateLabel label : {StateLabel::Background, StateLabel::Ambiguous,
                                   StateLabel::Actionable, StateLabel::Transformed})
        if (!expect(hits[label] > 0, std::string("branch never hit: ") + to_string(label),
                    detail))
            return false;
    return true;
}

// ---- C2: causal-ordering invariants over random sequences

bool c2_causal_invariants(std::string& detail) {
    Rng rng(20240501);
    for (int i = 0; i < 10000; ++i) {
        const int length = static_cast<int>(rng.uniform_int(0, 50));
        const LabelSequence seq = oracles::random_sequence(rng, length);
        const auto entry_sizes = index_set(seq, StateLabel::Actionable).size() +
                                 index_set(seq, StateLabel::Transformed).size();
        const auto [ordered, report] = causal_ordering(seq);
        const auto act = index_set(ordered, StateLabel::Actionable);
        const auto trf = index_set(ordered, StateLabel::Transformed);
        if (!act.empty() && !trf.empty() &&
            !expect(act.back() < trf.front(), "max(S_act) >= min(S_trf) after ordering",
                    detail))
            return false;
        if (!expect(report.iterations <= static_cast<std::int64_t>(entry_sizes),
                    "iteration count exceeded |S_act| + |S_trf| at entry", detail))
            return false;
        const auto [again, second] = causal_ordering(ordered);
        if (!expect(again.labels == ordered.labels && second.iterations == 0,
                    "causal ordering is not idempotent", detail))
            return false;
    }
    return true;
}

// ---- C3: the hand-traced dynamics fixtures

bool c3_hand_traces(std::string& detail) {
    using SL = StateLabel;
    const auto seq_of = [](const std::vector<SL>& labels) {
        LabelSequence seq;
        seq.track_id = "t0";
        for (std::size_t t = 0; t < labels.size(); ++t)
            seq.labels[static_cast<int>(t)] = labels[t];
        return seq;
    };
    const auto labels_of = [](const LabelSequence& seq) {
        std::vector<SL> out;
        for (const auto& [frame, label] : seq.labels) out.push_back(label);
        return out;
    };

    const auto trace1 =
        causal_ordering(seq_of({SL::Actionable, SL::Transformed, SL::Actionable,
                                SL::Transformed, SL::Transformed}));
    if (!expect(labels_of(trace1.first) ==
                    std::vector<SL>{SL::Actionable, SL::Actionable, SL::Actionable,
                                    SL::Transformed, SL::Transformed},
                "[A,T,A,T,T] did not refine to [A,A,A,T,T]", detail))
        return false;

    const auto trace2 = causal_ordering(seq_of({SL::Transformed, SL::Actionable}));
    if (!expect(labels_of(trace2.first) == std::vector<SL>{SL::Actionable, SL::Actionable},
                "[T,A] did not refine to [A,A]", detail))
        return false;

    const auto trace3 = ambiguity_resolution(
        seq_of({SL::Actionable, SL::Ambiguous, SL::Ambiguous, SL::Transformed}));
    if (!expect(labels_of(trace3.first) ==
                    std::vector<SL>{SL::Actionable, SL::Actionable, SL::Transformed,
                                    SL::Transformed},
                "[A,amb,amb,T] did not resolve to [A,A,T,T]", detail))
        return false;
    return true;
}

// ---- C4: ablation direction PL <= PL+CO <= PL+CO+AR on noisy corpora

bool c4_ablation_direction(std::string& detail) {
    double sum_pl = 0.0, sum_co = 0.0, sum_ar = 0.0;
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
        SynthConfig cfg;
        cfg.seed = 1000 + static_cast<std::uint64_t>(seed);
        cfg.clips = 100;
        cfg.frames_per_clip = 30;
        cfg.masklets_per_clip = 10; // 1000 masklets per seed
        cfg.grid_height = 32;
        cfg.grid_width = 32;
        cfg.noise_flip_prob = 0.2;
        cfg.ambiguous_prob = 0.1;
        const SynthCorpus corpus = generate_corpus(cfg);

        CorpusLabels pl, co, ar;
        for (const ClipRecord& clip : corpus.clips) {
            const LabelMap labels = pseudo_label_clip(clip, ThresholdConfig{0.5, 0.01});
            LabelMap co_map, ar_map;
            for (const auto& [track_id, seq] : labels) {
                auto [ordered, r1] = causal_ordering(seq);
                auto [resolved, r2] = ambiguity_resolution(ordered);
                co_map[track_id] = std::move(ordered);
                ar_map[track_id] = std::move(resolved);
            }
            pl[clip.clip_id] = labels;
            co[clip.clip_id] = std::move(co_map);
            ar[clip.clip_id] = std::move(ar_map);
        }
        sum_pl += label_accuracy(pl, corpus.truth);
        sum_co += label_accuracy(co, corpus.truth);
        sum_ar += label_accuracy(ar, corpus.truth);
    }
    const double acc_pl = sum_pl / seeds;
    const double acc_co = sum_co / seeds;
    const double acc_ar = sum_ar / seeds;
    std::ostringstream os;
    os << "PL=" << acc_pl << " +CO=" << acc_co << " +AR=" << acc_ar;
    const bool ordered = acc_pl <= acc_co && acc_co <= acc_ar;
    const bool margin = acc_ar - acc_pl >= 0.02;
    detail = (ordered && margin ? "" : "ablation ordering violated: ") + os.str();
    return ordered && margin;
}

// ---- C5: IoU equals the decoded-grid oracle; mIoU is the class-mean average

bool c5_miou_oracle(std::string& detail) {
    Rng rng(55);
    for (int i = 0; i < 500; ++i) {
        const int h = static_cast<int>(rng.uniform_int(1, 64));
        const int w = static_cast<int>(rng.uniform_int(1, 64));
        const PixelMask a = oracles::random_mask(rng, h, w, rng.uniform01());
        const PixelMask b = oracles::random_mask(rng, h, w, rng.uniform01());
        if (!expect(frame_iou(a, b) == oracles::pixel_iou(a, b),
                    "frame_iou disagrees with the pixel oracle", detail))
            return false;
    }

    // random evaluation scenario: miou must equal (act + trf) / 2 within 1e-12
    std::vector<ClipRecord> clips;
    CorpusPredictions preds;
    for (int c = 0; c < 20; ++c) {
        ClipRecord clip = fixtures::clip_skeleton("c" + std::to_string(c), "chop", 4, 12, 12);
        ClipPredictions clip_preds;
        for (int f = 0; f < 4; ++f) {
            GroundTruthFrame gt;
            gt.frame_index = f;
            gt.actionable = oracles::random_mask(rng, 12, 12, 0.4);
            Bitmap tb = oracles::random_bitmap(rng, 12, 12, 0.4);
            const Bitmap ab = rle_decode(gt.actionable);
            for (std::size_t p = 0; p < tb.data.size(); ++p)
                if (ab.data[p]) tb.data[p] = 0; // keep GT classes disjoint
            gt.transformed = rle_encode(tb);
            clip.ground_truth.push_back(gt);
            clip_preds.push_back({oracles::random_mask(rng, 12, 12, 0.4),
                                  oracles::random_mask(rng, 12, 12, 0.4)});
        }
        preds[clip.clip_id] = std::move(clip_preds);
        clips.push_back(std::move(clip));
    }
    const EvalResult r = evaluate(clips, preds, EvalConfig{});
    if (!expect(r.miou && r.miou_act && r.miou_trf, "undefined miou on random scenario",
                detail))
        return false;
    if (!expect(std::abs(*r.miou - (*r.miou_act + *r.miou_trf) / 2.0) <= 1e-12,
                "miou != (miou_act + miou_trf) / 2 within 1e-12", detail))
        return false;

    // recompute both class means with the pixel oracle, same conventions
    double act_sum = 0.0, trf_sum = 0.0;
    std::int64_t act_n = 0, trf_n = 0;
    for (const ClipRecord& clip : clips) {
        for (const GroundTruthFrame& gt : clip.ground_truth) {
            const FramePrediction& p =
                preds.at(clip.clip_id)[static_cast<std::size_t>(gt.frame_index)];
            if (const auto iou = oracles::pixel_iou(p.actionable, gt.actionable)) {
                act_sum += *iou;
                ++act_n;
            }
            if (const auto iou = oracles::pixel_iou(p.transformed, gt.transformed)) {
                trf_sum += *iou;
                ++trf_n;
            }
        }
    }
    if (!expect(std::abs(*r.miou_act - act_sum / act_n) <= 1e-12 &&
                    std::abs(*r.miou_trf - trf_sum / trf_n) <= 1e-12,
                "pooled class means disagree with the pixel oracle", detail))
        return false;
    return true;
}

// ---- C6: clean synth -> label -> refine -> eval -> progress run

bool c6_end_to_end(std::string& detail) {
    fixtures::TempDir dir("acceptance_e2e");
    PipelineConfig cfg;
    cfg.out_dir = dir.path();
    cfg.stages = {Stage::Synth, Stage::Label, Stage::Refine, Stage::Eval, Stage::Progress};
    cfg.synth.seed = 4242;
    cfg.synth.clips = 10;
    cfg.synth.frames_per_clip = 16;
    cfg.synth.masklets_per_clip = 4;
    cfg.synth.grid_height = 32;
    cfg.synth.grid_width = 32;
    run_pipeline(cfg);

    // verify in process, at exact equality
    const Corpus corpus = load_dataset(dir.path() / "dataset" / "manifest.json");
    const CorpusLabels labels = load_labels(dir.path() / "labels_refined.json");
    CorpusPredictions preds;
    for (const ClipRecord& clip : corpus)
        preds[clip.clip_id] = composite_prediction(clip, labels.at(clip.clip_id));
    const EvalResult r = evaluate(corpus, preds, EvalConfig{});
    if (!expect(r.miou && *r.miou == 1.0, "clean-run miou is not exactly 1.0", detail))
        return false;
    const ProgressReport pr = progress_report(corpus, preds);
    if (!expect(pr.aggregate.tau && *pr.aggregate.tau == -1.0,
                "clean-run tau is not exactly -1", detail))
        return false;
    if (!expect(pr.aggregate.end_sigma && *pr.aggregate.end_sigma == 0.0 &&
                    pr.aggregate.end_l2 && *pr.aggregate.end_l2 == 0.0,
                "clean-run end metrics are not exactly 0", detail))
        return false;
    return true;
}

// ---- C7: Kendall tau equals O(n^2) enumeration

bool c7_kendall(std::string& detail) {
    const auto curve_of = [](const std::vector<std::optional<double>>& values) {
        ProgressCurve c;
        c.values = values;
        c.phases.assign(values.size(), FramePhase::Unlabeled);
        return c;
    };
    if (!expect(*kendall_tau(curve_of({1.0, 0.8, 0.5, 0.2})) == -1.0,
                "[1.0,0.8,0.5,0.2] != -1", detail))
        return false;
    if (!expect(*kendall_tau(curve_of({0.2, 0.5, 0.8})) == 1.0, "[0.2,0.5,0.8] != +1",
                detail))
        return false;
    if (!expect(*kendall_tau(curve_of({0.5, 0.7, 0.3})) == (1.0 - 2.0) / 3.0,
                "[0.5,0.7,0.3] != -1/3", detail))
        return false;

    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        const int n = static_cast<int>(rng.uniform_int(0, 200));
        std::vector<std::optional<double>> values;
        values.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            if (rng.bernoulli(0.05)) values.emplace_back(std::nullopt);
            else if (rng.bernoulli(0.25)) values.emplace_back(rng.uniform_int(0, 4) * 0.25);
            else values.emplace_back(rng.uniform01());
        }
        if (!expect(kendall_tau(curve_of(values)) == oracles::kendall_enumeration(values),
                    "kendall_tau disagrees with enumeration at curve " + std::to_string(i),
                    detail))
            return false;
    }
    return true;
}

// ---- C8: progress fixtures and the variance decomposition

bool c8_progress_formulas(std::string& detail) {
    const auto r_of = [](int act, int trf) {
        ClipRecord clip = fixtures::clip_skeleton("c0", "chop", 1, 1, 256);
        ClipPredictions preds{{rect_mask(1, 256, 0, 0, 1, act),
                               rect_mask(1, 256, 0, act, 1, act + trf)}};
        return progress_curve(clip, preds).values[0];
    };
    if (!expect(*r_of(100, 0) == 1.0, "R(100, 0) != 1.0", detail)) return false;
    if (!expect(*r_of(0, 50) == 0.0, "R(0, 50) != 0.0", detail)) return false;
    if (!expect(*r_of(30, 70) == 0.3, "R(30, 70) != 0.3", detail)) return false;

    Rng rng(88);
    for (int i = 0; i < 500; ++i) {
        const int n = static_cast<int>(rng.uniform_int(1, 40));
        ProgressCurve curve;
        double mean = 0.0;
        for (int t = 0; t < n; ++t) {
            const double v = rng.uniform01();
            curve.values.emplace_back(v);
            curve.phases.push_back(FramePhase::End);
            mean += v;
        }
        mean /= n;
        const auto m = end_state_metrics(curve);
        if (!expect(m.has_value(), "end metrics undefined on a full end window", detail))
            return false;
        if (!expect(std::abs(m->l2 * m->l2 - (m->sigma + mean * mean)) <= 1e-12,
                    "end_l2^2 != end_sigma + mean^2 within 1e-12", detail))
            return false;
    }
    return true;
}

// ---- C9: byte-identical artifacts across runs and jobs settings

bool c9_determinism(std::string& detail) {
    const auto make_cfg = [](const std::filesystem::path& out, int jobs) {
        PipelineConfig cfg;
        cfg.out_dir = out;
        cfg.jobs = jobs;
        cfg.stages = {Stage::Synth, Stage::Label,    Stage::Refine,    Stage::Eval,
                      Stage::Progress, Stage::Analyze, Stage::GridSearch};
        cfg.refine_report = true;
        cfg.per_verb = true;
        cfg.taus = {0.4, 0.5};
        cfg.deltas = {0.01};
        cfg.synth.seed = 999;
        cfg.synth.clips = 8;
        cfg.synth.frames_per_clip = 12;
        cfg.synth.masklets_per_clip = 3;
        cfg.synth.grid_height = 16;
        cfg.synth.grid_width = 16;
        cfg.synth.noise_flip_prob = 0.15;
        cfg.synth.ambiguous_prob = 0.05;
        return cfg;
    };
    fixtures::TempDir dir_a("acceptance_det_a");
    fixtures::TempDir dir_b("acceptance_det_b");
    run_pipeline(make_cfg(dir_a.path(), 1));
    run_pipeline(make_cfg(dir_b.path(), 8));

    std::map<std::string, std::string> tree_a, tree_b;
    for (const auto& [root, tree] :
         {std::pair{dir_a.path(), &tree_a}, std::pair{dir_b.path(), &tree_b}})
        for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
            if (entry.is_regular_file())
                (*tree)[std::filesystem::relative(entry.path(), root).string()] =
                    read_text_file(entry.path());
    if (!expect(tree_a.size() == tree_b.size(), "artifact sets differ", detail))
        return false;
    for (const auto& [rel, content] : tree_a) {
        if (!expect(tree_b.count(rel) == 1, "artifact missing in second run: " + rel,
                    detail))
            return false;
        if (!expect(content == tree_b.at(rel), "artifact bytes differ: " + rel, detail))
            return false;
    }
    return true;
}

// ---- C10: malformed inputs are rejected with located errors

bool c10_format_robustness(std::string& detail) {
    fixtures::TempDir dir("acceptance_fmt");
    const auto write = [&](const std::string& rel, const std::string& text) {
        write_text_file(dir.path() / rel, text);
    };
    const auto expect_reject = [&](const std::string& manifest_rel,
                                   const std::vector<std::string>& needles,
                                   const std::string& what_case) {
        try {
            load_dataset(dir.path() / manifest_rel);
            detail = what_case + ": accepted instead of rejected";
            return false;
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            for (const auto& needle : needles)
                if (what.find(needle) == std::string::npos) {
                    detail = what_case + ": error lacks '" + needle + "': " + what;
                    return false;
                }
            return true;
        }
    };

    // malformed RLE (run total != grid size)
    write("bad_rle/clips/c.json", R"({
      "format_version": 1, "clip_id": "bad_rle", "frame_count": 1, "fps": 1.0,
      "grid": [2, 2],
      "osc": {"verb": "chop", "noun": "x", "prompt_act": "a", "prompt_trf": "b"},
      "masklets": [{"track_id": "t0", "regions": [
        {"frame": 0, "mask": {"size": [2, 2], "counts": [0, 9]}, "scores": [0.6, 0.2]}]}]
    })");
    write("bad_rle/manifest.json", R"({"format_version": 1, "clips": ["clips/c.json"]})");
    if (!expect_reject("bad_rle/manifest.json",
                       {"clip 'bad_rle'", "track 't0'", "frame 0"}, "malformed RLE"))
        return false;

    // overlapping ground-truth classes
    write("gt_overlap/clips/c.json", R"({
      "format_version": 1, "clip_id": "gt_overlap", "frame_count": 1, "fps": 1.0,
      "grid": [2, 2],
      "osc": {"verb": "chop", "noun": "x", "prompt_act": "a", "prompt_trf": "b"},
      "ground_truth": [{"frame": 0,
        "actionable": {"size": [2, 2], "counts": [0, 2, 2]},
        "transformed": {"size": [2, 2], "counts": [1, 1, 2]}}]
    })");
    write("gt_overlap/manifest.json", R"({"format_version": 1, "clips": ["clips/c.json"]})");
    if (!expect_reject("gt_overlap/manifest.json",
                       {"clip 'gt_overlap'", "frame 0", "overlap"},
                       "overlapping ground truth"))
        return false;

    // dangling track reference in a labels file
    SynthConfig synth_cfg;
    synth_cfg.seed = 1;
    synth_cfg.clips = 1;
    synth_cfg.frames_per_clip = 4;
    synth_cfg.masklets_per_clip = 1;
    synth_cfg.grid_height = 8;
    synth_cfg.grid_width = 8;
    const SynthCorpus corpus = generate_corpus(synth_cfg);
    CorpusLabels labels;
    labels["synth_00000"]["ghost"].track_id = "ghost";
    labels["synth_00000"]["ghost"].labels[0] = StateLabel::Actionable;
    try {
        validate_labels(labels, corpus.clips, "labels.json");
        detail = "dangling track: accepted instead of rejected";
        return false;
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        for (const char* needle : {"labels.json", "synth_00000", "ghost", "unknown track"})
            if (what.find(needle) == std::string::npos) {
                detail = std::string("dangling track: error lacks '") + needle + "': " + what;
                return false;
            }
    }
    return true;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"C1 threshold-rule branch agreement (tau=0.5, delta=0.01)", c1_threshold_branches,
         1000},
        {"C2 causal-ordering invariants on 10^4 random sequences", c2_causal_invariants,
         10000},
        {"C3 hand-traced dynamics fixtures", c3_hand_traces},
        {"C4 ablation direction PL <= +CO <= +AR, gain >= 0.02 (5 seeds)",
         c4_ablation_direction, 60000},
        {"C5 IoU pixel-oracle equivalence and mIoU class-mean identity", c5_miou_oracle,
         10000},
        {"C6 clean end-to-end run: miou == 1, tau == -1, end metrics == 0", c6_end_to_end,
         30000},
        {"C7 Kendall tau equals pair enumeration (1000 curves, n <= 200)", c7_kendall},
        {"C8 progress fixtures and variance decomposition (1e-12)", c8_progress_formulas},
        {"C9 byte-identical artifacts across runs and --jobs", c9_determinism},
        {"C10 located rejection of malformed inputs", c10_format_robustness},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        if (ok && criterion.budget_ms > 0 && ms > criterion.budget_ms) {
            ok = false;
            detail = "runtime " + std::to_string(ms) + " ms exceeds budget " +
                     std::to_string(criterion.budget_ms) + " ms";
        }
        if (ok) {
            std::printf("[PASS] %s (%lld ms)%s%s\n", criterion.name,
                        static_cast<long long>(ms), detail.empty() ? "" : ": ",
                        detail.c_str());
        } else {
            std::printf("[FAIL] %s (%lld ms)%s%s\n", criterion.name,
                        static_cast<long long>(ms), detail.empty() ? "" : ": ",
                        detail.c_str());
            ++failures;
        }
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
