#pragma once

#include "oscpipe/labeling.hpp"
#include "oscpipe/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace osc {

inline constexpr int kFormatVersion = 1;

/// Dataset header: format metadata plus references to the per-clip files,
/// all relative to the manifest's directory.
struct DatasetManifest {
    int format_version = kFormatVersion;
    std::string score_convention = "raw-dot"; // how the similarity scores were produced
    std::optional<int> embedding_dim;
    std::vector<std::string> clip_files;
    std::optional<std::string> thresholds_file;
    std::optional<std::string> splits_file;
    std::string config_hash;
    std::optional<std::string> rng;
    std::optional<std::uint64_t> seed;
};

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

/// Loads the manifest plus every referenced clip file and validates the
/// full data model; errors carry file/clip/track/frame coordinates. The
/// splits file, when referenced, overrides per-clip split tags.
Corpus load_dataset(const std::filesystem::path& manifest_path);

/// Writes manifest + clips/<clip_id>.json under `dir` (created if absent).
/// `meta.clip_files` is filled in from the corpus. Returns the manifest path.
std::filesystem::path save_dataset(const Corpus& corpus,
                                   const std::filesystem::path& dir,
                                   DatasetManifest meta);

/// Lossless label round-trip, Ambiguous and Background included.
void save_labels(const CorpusLabels& labels, const std::filesystem::path& path,
                 const std::string& config_hash);
CorpusLabels load_labels(const std::filesystem::path& path);

/// Rejects labels that reference unknown clips or tracks, or whose frame
/// index sets differ from the masklet's.
void validate_labels(const CorpusLabels& labels, const Corpus& corpus,
                     const std::string& file = "");

ThresholdTable load_thresholds(const std::filesystem::path& path);
void save_thresholds(const ThresholdTable& table, const std::filesystem::path& path,
                     const std::string& config_hash);

/// FNV-1a 64-bit over the canonical (sorted-key) JSON text of a config;
/// 16 hex digits. Embedded in every artifact this configuration produces.
std::string config_hash_hex(const std::string& canonical_config);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

/// Text file writing with deterministic bytes ('\n' line ends, no locale).
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Starts a CSV artifact: "# format_version=... config_hash=..." plus one
/// "# note: ..." line per note, then the header row.
std::string csv_preamble(const std::string& config_hash,
                         const std::vector<std::string>& notes,
                         const std::string& header);

} // namespace osc
