#pragma once

#include <cstdint>
#include <vector>

namespace osc {

/// Row-major binary grid, one byte per pixel (0 or 1).
struct Bitmap {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data; // height * width entries

    std::uint8_t at(int row, int col) const {
        return data[static_cast<std::size_t>(row) * width + col];
    }
    void set(int row, int col, std::uint8_t v) {
        data[static_cast<std::size_t>(row) * width + col] = v;
    }
};

Bitmap make_bitmap(int height, int width);

/// Run-length-encoded binary mask over a fixed frame grid.
/// Runs alternate background/foreground in row-major scan order and start
/// with a background run; a mask whose first pixel is foreground therefore
/// begins with a single zero-length run. sum(runs) == height * width.
struct PixelMask {
    int height = 0;
    int width = 0;
    std::vector<std::int64_t> runs;
};

/// Throws ValidationError if the runs violate the format invariants:
/// negative runs, adjacent zero runs past the permitted leading one, or a
/// run total different from height * width.
void validate_mask(const PixelMask& mask);

PixelMask rle_encode(const Bitmap& grid);
Bitmap rle_decode(const PixelMask& mask); // validates first

std::int64_t mask_area(const PixelMask& mask);
bool mask_empty(const PixelMask& mask);

/// Set algebra. Both operands must share (height, width); mismatch throws.
PixelMask mask_intersection(const PixelMask& a, const PixelMask& b);
PixelMask mask_union(const PixelMask& a, const PixelMask& b);
std::int64_t intersection_area(const PixelMask& a, const PixelMask& b);
std::int64_t union_area(const PixelMask& a, const PixelMask& b);

bool mask_equal(const PixelMask& a, const PixelMask& b);

PixelMask empty_mask(int height, int width);

/// Axis-aligned rectangle [row0, row1) x [col0, col1), clipped to the grid.
PixelMask rect_mask(int height, int width, int row0, int col0, int row1, int col1);

/// Foreground intervals as half-open [start, end) spans of the linear
/// row-major pixel index. The canonical low-level form all set algebra
/// runs on.
std::vector<std::pair<std::int64_t, std::int64_t>> mask_intervals(const PixelMask& mask);
PixelMask mask_from_intervals(int height, int width,
                              const std::vector<std::pair<std::int64_t, std::int64_t>>& spans);

} // namespace osc
