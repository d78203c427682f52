#include "oscpipe/mask.hpp"

#include "oscpipe/error.hpp"

#include <algorithm>
#include <string>

namespace osc {

Bitmap make_bitmap(int height, int width) {
    Bitmap b;
    b.height = height;
    b.width = width;
    b.data.assign(static_cast<std::size_t>(height) * width, 0);
    return b;
}

void validate_mask(const PixelMask& mask) {
    if (mask.height <= 0 || mask.width <= 0)
        throw ValidationError("mask dimensions must be positive, got " +
                              std::to_string(mask.height) + "x" + std::to_string(mask.width));
    std::int64_t total = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        const auto r = mask.runs[i];
        if (r < 0)
            throw ValidationError("mask run " + std::to_string(i) + " is negative");
        if (r == 0 && i > 0 && mask.runs[i - 1] == 0)
            throw ValidationError("mask has adjacent zero runs at position " + std::to_string(i));
        total += r;
    }
    const std::int64_t expected = static_cast<std::int64_t>(mask.height) * mask.width;
    if (total != expected)
        throw ValidationError("mask runs sum to " + std::to_string(total) + ", expected " +
                              std::to_string(expected) + " for " + std::to_string(mask.height) +
                              "x" + std::to_string(mask.width));
}

PixelMask rle_encode(const Bitmap& grid) {
    if (grid.height <= 0 || grid.width <= 0)
        throw ValidationError("grid dimensions must be positive");
    PixelMask mask;
    mask.height = grid.height;
    mask.width = grid.width;
    std::uint8_t current = 0; // runs start counting background pixels
    std::int64_t run = 0;
    for (const std::uint8_t px : grid.data) {
        const std::uint8_t bit = px ? 1 : 0;
        if (bit == current) {
            ++run;
        } else {
            mask.runs.push_back(run);
            current = bit;
            run = 1;
        }
    }
    mask.runs.push_back(run);
    return mask;
}

Bitmap rle_decode(const PixelMask& mask) {
    validate_mask(mask);
    Bitmap grid = make_bitmap(mask.height, mask.width);
    std::size_t pos = 0;
    std::uint8_t value = 0;
    for (const auto run : mask.runs) {
        std::fill_n(grid.data.begin() + pos, run, value);
        pos += static_cast<std::size_t>(run);
        value ^= 1;
    }
    return grid;
}

std::int64_t mask_area(const PixelMask& mask) {
    std::int64_t area = 0;
    for (std::size_t i = 1; i < mask.runs.size(); i += 2) area += mask.runs[i];
    return area;
}

bool mask_empty(const PixelMask& mask) { return mask_area(mask) == 0; }

std::vector<std::pair<std::int64_t, std::int64_t>> mask_intervals(const PixelMask& mask) {
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        if (i % 2 == 1 && mask.runs[i] > 0) spans.emplace_back(pos, pos + mask.runs[i]);
        pos += mask.runs[i];
    }
    return spans;
}

PixelMask mask_from_intervals(int height, int width,
                              const std::vector<std::pair<std::int64_t, std::int64_t>>& spans) {
    // spans must be sorted by start; touching or overlapping spans are coalesced
    std::vector<std::pair<std::int64_t, std::int64_t>> merged;
    for (const auto& span : spans) {
        if (span.second <= span.first) continue;
        if (!merged.empty() && span.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, span.second);
        else
            merged.push_back(span);
    }
    PixelMask mask;
    mask.height = height;
    mask.width = width;
    std::int64_t pos = 0;
    for (const auto& [start, end] : merged) {
        mask.runs.push_back(start - pos); // gap; zero only as the leading run
        mask.runs.push_back(end - start);
        pos = end;
    }
    const std::int64_t total = static_cast<std::int64_t>(height) * width;
    if (pos < total || mask.runs.empty()) mask.runs.push_back(total - pos);
    return mask;
}

namespace {

void require_same_grid(const PixelMask& a, const PixelMask& b) {
    if (a.height != b.height || a.width != b.width)
        throw Error("mask dimension mismatch: " + std::to_string(a.height) + "x" +
                    std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                    std::to_string(b.width));
}

using Spans = std::vector<std::pair<std::int64_t, std::int64_t>>;

Spans intersect_spans(const Spans& a, const Spans& b) {
    Spans out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const auto lo = std::max(a[i].first, b[j].first);
        const auto hi = std::min(a[i].second, b[j].second);
        if (lo < hi) out.emplace_back(lo, hi);
        if (a[i].second < b[j].second) ++i; else ++j;
    }
    return out;
}

Spans union_spans(const Spans& a, const Spans& b) {
    Spans out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        std::pair<std::int64_t, std::int64_t> next;
        if (j == b.size() || (i < a.size() && a[i].first <= b[j].first)) next = a[i++];
        else next = b[j++];
        if (!out.empty() && next.first <= out.back().second)
            out.back().second = std::max(out.back().second, next.second);
        else
            out.push_back(next);
    }
    return out;
}

std::int64_t spans_area(const Spans& s) {
    std::int64_t area = 0;
    for (const auto& [lo, hi] : s) area += hi - lo;
    return area;
}

} // namespace

PixelMask mask_intersection(const PixelMask& a, const PixelMask& b) {
    require_same_grid(a, b);
    return mask_from_intervals(a.height, a.width,
                               intersect_spans(mask_intervals(a), mask_intervals(b)));
}

PixelMask mask_union(const PixelMask& a, const PixelMask& b) {
    require_same_grid(a, b);
    return mask_from_intervals(a.height, a.width,
                               union_spans(mask_intervals(a), mask_intervals(b)));
}

std::int64_t intersection_area(const PixelMask& a, const PixelMask& b) {
    require_same_grid(a, b);
    return spans_area(intersect_spans(mask_intervals(a), mask_intervals(b)));
}

std::int64_t union_area(const PixelMask& a, const PixelMask& b) {
    require_same_grid(a, b);
    return spans_area(union_spans(mask_intervals(a), mask_intervals(b)));
}

bool mask_equal(const PixelMask& a, const PixelMask& b) {
    return a.height == b.height && a.width == b.width &&
           mask_intervals(a) == mask_intervals(b);
}

PixelMask empty_mask(int height, int width) {
    PixelMask mask;
    mask.height = height;
    mask.width = width;
    mask.runs = {static_cast<std::int64_t>(height) * width};
    return mask;
}

PixelMask rect_mask(int height, int width, int row0, int col0, int row1, int col1) {
    row0 = std::clamp(row0, 0, height);
    row1 = std::clamp(row1, 0, height);
    col0 = std::clamp(col0, 0, width);
    col1 = std::clamp(col1, 0, width);
    std::vector<std::pair<std::int64_t, std::int64_t>> spans;
    for (int r = row0; r < row1; ++r) {
        if (col0 < col1)
            spans.emplace_back(static_cast<std::int64_t>(r) * width + col0,
                               static_cast<std::int64_t>(r) * width + col1);
    }
    return mask_from_intervals(height, width, spans);
}

} // namespace osc
