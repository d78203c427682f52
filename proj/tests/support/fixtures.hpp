#pragma once

// Shared helpers for building tiny clips and scratch directories in tests.

#include "oscpipe/mask.hpp"
#include "oscpipe/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

namespace fixtures {

/// Mask from row strings, e.g. {"10", "01"}; any character except '0', '.'
/// and ' ' is foreground.
inline osc::PixelMask mask_of(const std::vector<std::string>& rows) {
    osc::Bitmap grid = osc::make_bitmap(static_cast<int>(rows.size()),
                                        static_cast<int>(rows.front().size()));
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c) {
            const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            grid.set(r, c, ch != '0' && ch != '.' && ch != ' ' ? 1 : 0);
        }
    return osc::rle_encode(grid);
}

inline osc::ClipRecord clip_skeleton(const std::string& id, const std::string& verb,
                                     int frames, int height, int width) {
    osc::ClipRecord clip;
    clip.clip_id = id;
    clip.osc = {verb, "object", "whole object", "changed object"};
    clip.frame_count = frames;
    clip.fps = 1.0;
    clip.height = height;
    clip.width = width;
    return clip;
}

inline osc::MaskRegion region_at(int frame, osc::PixelMask mask, double s_act, double s_trf) {
    osc::MaskRegion r;
    r.frame_index = frame;
    r.mask = std::move(mask);
    r.scores = osc::SimilarityPair{s_act, s_trf};
    return r;
}

/// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("oscpipe_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<long>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace fixtures
