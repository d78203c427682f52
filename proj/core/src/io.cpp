#include "oscpipe/io.hpp"

#include "oscpipe/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

namespace osc {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return j;
}

void check_version(const json& j, const std::string& file) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw ValidationError(file + ": missing format_version");
    const int version = j["format_version"].get<int>();
    if (version != kFormatVersion)
        throw ValidationError(file + ": unknown format_version " + std::to_string(version) +
                              " (expected " + std::to_string(kFormatVersion) + ")");
}

json mask_to_json(const PixelMask& mask) {
    return json{{"size", {mask.height, mask.width}}, {"counts", mask.runs}};
}

PixelMask mask_from_json(const json& j, const std::string& file, const std::string& clip,
                         const std::string& track, int frame) {
    if (!j.is_object() || !j.contains("size") || !j.contains("counts"))
        fail_located(file, clip, track, frame, "mask must have 'size' and 'counts'");
    PixelMask mask;
    try {
        mask.height = j["size"].at(0).get<int>();
        mask.width = j["size"].at(1).get<int>();
        mask.runs = j["counts"].get<std::vector<std::int64_t>>();
    } catch (const json::exception& e) {
        fail_located(file, clip, track, frame, std::string("malformed mask: ") + e.what());
    }
    try {
        validate_mask(mask);
    } catch (const ValidationError& e) {
        fail_located(file, clip, track, frame, e.what());
    }
    return mask;
}

ClipRecord clip_from_json(const json& j, const std::string& file) {
    check_version(j, file);
    ClipRecord clip;
    try {
        clip.clip_id = j.at("clip_id").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(file + ": missing clip_id: " + e.what());
    }
    const std::string& id = clip.clip_id;
    try {
        const json& osc_j = j.at("osc");
        clip.osc.verb = osc_j.at("verb").get<std::string>();
        clip.osc.noun = osc_j.at("noun").get<std::string>();
        clip.osc.prompt_act = osc_j.at("prompt_act").get<std::string>();
        clip.osc.prompt_trf = osc_j.at("prompt_trf").get<std::string>();
        clip.frame_count = j.at("frame_count").get<int>();
        clip.fps = j.at("fps").get<double>();
        clip.height = j.at("grid").at(0).get<int>();
        clip.width = j.at("grid").at(1).get<int>();
        if (j.contains("split"))
            clip.split = split_tag_from_string(j["split"].get<std::string>());
        if (j.contains("detection_cadence"))
            clip.detection_cadence = j["detection_cadence"].get<int>();
        if (j.contains("frame_phases")) {
            for (const auto& p : j["frame_phases"])
                clip.frame_phases.push_back(frame_phase_from_string(p.get<std::string>()));
        }
        if (j.contains("text_embeddings")) {
            TextEmbeddings te;
            te.act = j["text_embeddings"].at("act").get<std::vector<double>>();
            te.trf = j["text_embeddings"].at("trf").get<std::vector<double>>();
            clip.text_embeddings = std::move(te);
        }
    } catch (const json::exception& e) {
        fail_located(file, id, "", -1, std::string("malformed clip: ") + e.what());
    }

    if (j.contains("masklets")) {
        for (const auto& m : j["masklets"]) {
            std::string track_id;
            std::vector<MaskRegion> regions;
            try {
                track_id = m.at("track_id").get<std::string>();
                for (const auto& r : m.at("regions")) {
                    MaskRegion region;
                    region.frame_index = r.at("frame").get<int>();
                    region.mask = mask_from_json(r.at("mask"), file, id, track_id,
                                                 region.frame_index);
                    if (r.contains("scores")) {
                        region.scores = SimilarityPair{r["scores"].at(0).get<double>(),
                                                       r["scores"].at(1).get<double>()};
                    }
                    if (r.contains("embedding"))
                        region.embedding = r["embedding"].get<std::vector<double>>();
                    if (r.contains("bbox")) {
                        std::array<double, 4> bbox{};
                        for (int i = 0; i < 4; ++i) bbox[i] = r["bbox"].at(i).get<double>();
                        region.bbox = bbox;
                    }
                    regions.push_back(std::move(region));
                }
            } catch (const json::exception& e) {
                fail_located(file, id, track_id, -1,
                             std::string("malformed masklet: ") + e.what());
            }
            Masklet masklet; // validated as a whole by validate_clip below
            masklet.track_id = std::move(track_id);
            masklet.regions = std::move(regions);
            clip.masklets.push_back(std::move(masklet));
        }
    }

    if (j.contains("ground_truth")) {
        for (const auto& g : j["ground_truth"]) {
            GroundTruthFrame gt;
            try {
                gt.frame_index = g.at("frame").get<int>();
            } catch (const json::exception& e) {
                fail_located(file, id, "", -1, std::string("malformed ground truth: ") + e.what());
            }
            gt.actionable =
                mask_from_json(g.at("actionable"), file, id, "", gt.frame_index);
            gt.transformed =
                mask_from_json(g.at("transformed"), file, id, "", gt.frame_index);
            if (g.contains("ignored")) gt.ignored = g["ignored"].get<bool>();
            clip.ground_truth.push_back(std::move(gt));
        }
    }

    validate_clip(clip, file);
    return clip;
}

json clip_to_json(const ClipRecord& clip, const std::string& config_hash) {
    json j;
    j["format_version"] = kFormatVersion;
    j["config_hash"] = config_hash;
    j["clip_id"] = clip.clip_id;
    j["osc"] = {{"verb", clip.osc.verb},
                {"noun", clip.osc.noun},
                {"prompt_act", clip.osc.prompt_act},
                {"prompt_trf", clip.osc.prompt_trf}};
    j["frame_count"] = clip.frame_count;
    j["fps"] = clip.fps;
    j["grid"] = {clip.height, clip.width};
    j["split"] = to_string(clip.split);
    if (clip.detection_cadence) j["detection_cadence"] = *clip.detection_cadence;
    if (!clip.frame_phases.empty()) {
        json phases = json::array();
        for (const FramePhase p : clip.frame_phases) phases.push_back(to_string(p));
        j["frame_phases"] = std::move(phases);
    }
    if (clip.text_embeddings)
        j["text_embeddings"] = {{"act", clip.text_embeddings->act},
                                {"trf", clip.text_embeddings->trf}};
    json masklets = json::array();
    for (const auto& masklet : clip.masklets) {
        json regions = json::array();
        for (const auto& region : masklet.regions) {
            json r;
            r["frame"] = region.frame_index;
            r["mask"] = mask_to_json(region.mask);
            if (region.scores) r["scores"] = {region.scores->act, region.scores->trf};
            if (region.embedding) r["embedding"] = *region.embedding;
            if (region.bbox) r["bbox"] = *region.bbox;
            regions.push_back(std::move(r));
        }
        masklets.push_back(json{{"track_id", masklet.track_id},
                                {"regions", std::move(regions)}});
    }
    j["masklets"] = std::move(masklets);
    if (clip.has_ground_truth()) {
        json gts = json::array();
        for (const auto& gt : clip.ground_truth) {
            gts.push_back(json{{"frame", gt.frame_index},
                               {"actionable", mask_to_json(gt.actionable)},
                               {"transformed", mask_to_json(gt.transformed)},
                               {"ignored", gt.ignored}});
        }
        j["ground_truth"] = std::move(gts);
    }
    return j;
}

} // namespace

DatasetManifest load_manifest(const std::filesystem::path& manifest_path) {
    const json j = load_json(manifest_path);
    const std::string file = manifest_path.string();
    check_version(j, file);
    DatasetManifest m;
    try {
        if (j.contains("score_convention"))
            m.score_convention = j["score_convention"].get<std::string>();
        if (j.contains("embedding_dim")) m.embedding_dim = j["embedding_dim"].get<int>();
        m.clip_files = j.at("clips").get<std::vector<std::string>>();
        if (j.contains("thresholds") && !j["thresholds"].is_null())
            m.thresholds_file = j["thresholds"].get<std::string>();
        if (j.contains("splits") && !j["splits"].is_null())
            m.splits_file = j["splits"].get<std::string>();
        if (j.contains("config_hash")) m.config_hash = j["config_hash"].get<std::string>();
        if (j.contains("rng")) m.rng = j["rng"].get<std::string>();
        if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError(file + ": malformed manifest: " + e.what());
    }
    return m;
}

Corpus load_dataset(const std::filesystem::path& manifest_path) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();

    if (manifest.thresholds_file &&
        !std::filesystem::exists(base / *manifest.thresholds_file))
        throw ValidationError(manifest_path.string() + ": thresholds file not found: " +
                              (base / *manifest.thresholds_file).string());

    std::map<std::string, SplitTag> split_overrides;
    if (manifest.splits_file) {
        const auto splits_path = base / *manifest.splits_file;
        if (!std::filesystem::exists(splits_path))
            throw ValidationError(manifest_path.string() + ": splits file not found: " +
                                  splits_path.string());
        const json sj = load_json(splits_path);
        check_version(sj, splits_path.string());
        for (const auto& [clip_id, tag] : sj.at("splits").items())
            split_overrides[clip_id] = split_tag_from_string(tag.get<std::string>());
    }

    Corpus corpus;
    std::set<std::string> seen_ids;
    for (const std::string& rel : manifest.clip_files) {
        const auto clip_path = base / rel;
        if (!std::filesystem::exists(clip_path))
            throw ValidationError(manifest_path.string() +
                                  ": referenced clip file not found: " + clip_path.string());
        ClipRecord clip = clip_from_json(load_json(clip_path), clip_path.string());
        if (!seen_ids.insert(clip.clip_id).second)
            throw ValidationError(manifest_path.string() + ": duplicate clip_id '" +
                                  clip.clip_id + "'");
        if (manifest.embedding_dim) {
            for (const auto& masklet : clip.masklets)
                for (const auto& region : masklet.regions)
                    if (region.embedding &&
                        static_cast<int>(region.embedding->size()) != *manifest.embedding_dim)
                        fail_located(clip_path.string(), clip.clip_id, masklet.track_id,
                                     region.frame_index,
                                     "embedding dimension " +
                                         std::to_string(region.embedding->size()) +
                                         " does not match manifest embedding_dim " +
                                         std::to_string(*manifest.embedding_dim));
        }
        const auto split_it = split_overrides.find(clip.clip_id);
        if (split_it != split_overrides.end()) clip.split = split_it->second;
        corpus.push_back(std::move(clip));
    }
    return corpus;
}

std::filesystem::path save_dataset(const Corpus& corpus, const std::filesystem::path& dir,
                                   DatasetManifest meta) {
    std::filesystem::create_directories(dir / "clips");
    meta.clip_files.clear();
    for (const ClipRecord& clip : corpus) {
        const std::string rel = "clips/" + clip.clip_id + ".json";
        write_text_file(dir / rel, clip_to_json(clip, meta.config_hash).dump(1) + "\n");
        meta.clip_files.push_back(rel);
    }
    json j;
    j["format_version"] = kFormatVersion;
    j["config_hash"] = meta.config_hash;
    j["score_convention"] = meta.score_convention;
    if (meta.embedding_dim) j["embedding_dim"] = *meta.embedding_dim;
    j["clips"] = meta.clip_files;
    if (meta.thresholds_file) j["thresholds"] = *meta.thresholds_file;
    if (meta.splits_file) j["splits"] = *meta.splits_file;
    if (meta.rng) j["rng"] = *meta.rng;
    if (meta.seed) j["seed"] = *meta.seed;
    const auto manifest_path = dir / "manifest.json";
    write_text_file(manifest_path, j.dump(1) + "\n");
    return manifest_path;
}

void save_labels(const CorpusLabels& labels, const std::filesystem::path& path,
                 const std::string& config_hash) {
    json clips = json::object();
    for (const auto& [clip_id, label_map] : labels) {
        json tracks = json::object();
        for (const auto& [track_id, seq] : label_map) {
            json entries = json::array();
            for (const auto& [frame, label] : seq.labels)
                entries.push_back(json::array({frame, to_string(label)}));
            tracks[track_id] = std::move(entries);
        }
        clips[clip_id] = std::move(tracks);
    }
    json j;
    j["format_version"] = kFormatVersion;
    j["config_hash"] = config_hash;
    j["clips"] = std::move(clips);
    write_text_file(path, j.dump(1) + "\n");
}

CorpusLabels load_labels(const std::filesystem::path& path) {
    const json j = load_json(path);
    const std::string file = path.string();
    check_version(j, file);
    CorpusLabels labels;
    try {
        for (const auto& [clip_id, tracks] : j.at("clips").items()) {
            LabelMap label_map;
            for (const auto& [track_id, entries] : tracks.items()) {
                LabelSequence seq;
                seq.track_id = track_id;
                for (const auto& entry : entries) {
                    const int frame = entry.at(0).get<int>();
                    const StateLabel label =
                        state_label_from_string(entry.at(1).get<std::string>());
                    if (!seq.labels.emplace(frame, label).second)
                        fail_located(file, clip_id, track_id, frame,
                                     "duplicate frame in label sequence");
                }
                label_map[track_id] = std::move(seq);
            }
            labels[clip_id] = std::move(label_map);
        }
    } catch (const json::exception& e) {
        throw ValidationError(file + ": malformed labels: " + e.what());
    }
    return labels;
}

void validate_labels(const CorpusLabels& labels, const Corpus& corpus,
                     const std::string& file) {
    std::map<std::string, const ClipRecord*> by_id;
    for (const ClipRecord& clip : corpus) by_id[clip.clip_id] = &clip;
    for (const auto& [clip_id, label_map] : labels) {
        const auto clip_it = by_id.find(clip_id);
        if (clip_it == by_id.end())
            fail_located(file, clip_id, "", -1, "labels reference unknown clip");
        const ClipRecord& clip = *clip_it->second;
        for (const auto& [track_id, seq] : label_map) {
            const Masklet* masklet = nullptr;
            for (const auto& m : clip.masklets)
                if (m.track_id == track_id) { masklet = &m; break; }
            if (!masklet)
                fail_located(file, clip_id, track_id, -1, "labels reference unknown track");
            if (seq.labels.size() != masklet->regions.size())
                fail_located(file, clip_id, track_id, -1,
                             "label sequence covers " + std::to_string(seq.labels.size()) +
                                 " frames, masklet has " +
                                 std::to_string(masklet->regions.size()));
            for (const auto& region : masklet->regions)
                if (!seq.labels.count(region.frame_index))
                    fail_located(file, clip_id, track_id, region.frame_index,
                                 "label sequence does not cover masklet frame");
        }
    }
}

ThresholdTable load_thresholds(const std::filesystem::path& path) {
    const json j = load_json(path);
    const std::string file = path.string();
    check_version(j, file);
    ThresholdTable table;
    try {
        if (j.contains("default")) {
            table.fallback.tau = j["default"].at(0).get<double>();
            table.fallback.delta = j["default"].at(1).get<double>();
        }
        if (j.contains("per_verb")) {
            for (const auto& [verb, pair] : j["per_verb"].items())
                table.per_verb[verb] =
                    ThresholdConfig{pair.at(0).get<double>(), pair.at(1).get<double>()};
        }
    } catch (const json::exception& e) {
        throw ValidationError(file + ": malformed thresholds: " + e.what());
    }
    if (table.fallback.delta < 0.0)
        throw ValidationError(file + ": delta must be >= 0");
    for (const auto& [verb, cfg] : table.per_verb)
        if (cfg.delta < 0.0)
            throw ValidationError(file + ": delta must be >= 0 (verb '" + verb + "')");
    return table;
}

void save_thresholds(const ThresholdTable& table, const std::filesystem::path& path,
                     const std::string& config_hash) {
    json j;
    j["format_version"] = kFormatVersion;
    j["config_hash"] = config_hash;
    j["default"] = {table.fallback.tau, table.fallback.delta};
    json per_verb = json::object();
    for (const auto& [verb, cfg] : table.per_verb) per_verb[verb] = {cfg.tau, cfg.delta};
    j["per_verb"] = std::move(per_verb);
    write_text_file(path, j.dump(1) + "\n");
}

std::string config_hash_hex(const std::string& canonical_config) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : canonical_config) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

std::string csv_preamble(const std::string& config_hash,
                         const std::vector<std::string>& notes, const std::string& header) {
    std::string out = "# format_version=" + std::to_string(kFormatVersion) +
                      " config_hash=" + config_hash + "\n";
    for (const auto& note : notes) out += "# note: " + note + "\n";
    out += header + "\n";
    return out;
}

} // namespace osc
