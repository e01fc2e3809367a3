// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "taleforge/glyphs.hpp"
#include "taleforge/hmap.hpp"
#include "taleforge/image.hpp"
#include "taleforge/narrative.hpp"

namespace taleforge {

struct HeadLocation {
    int x = 0;       // image-space pixel
    int y = 0;
    Heatmap logits;  // combined saliency resampled to image dims, post suppression
};

struct GetLocationOptions {
    // Scales both the 400 px proximity radius and the 100 px suppression
    // window, for frames much smaller than the constants assume.
    double suppression_scale = 1.0;
};

/// Head localization. C = maps[0] * minmax(maps[1]) * minmax(maps[2]) * ...
/// (a constant map min-maxes to zero); peak = row-major first-occurrence
/// argmax, scaled into image space by integer floor; logits = bilinear
/// resample of C. Then, sequentially per used location closer than the
/// radius to the current peak, the window centered on the peak is halved
/// and the argmax retaken. Maps must share dims and be single-channel.
HeadLocation get_location(int image_w, int image_h, const std::vector<Heatmap>& prompt_maps,
                          const std::vector<std::pair<int, int>>& used_locations,
                          const GetLocationOptions& opts = {});

/// Greedy wrap on whitespace into lines of at most max_words_per_line words.
std::vector<std::string> wrap_text(const std::string& text, int max_words_per_line = 4);

/// Metric model: advance = ceil(0.6 fs), line height = ceil(1.2 fs), width =
/// longest line's code-point count times the advance.
std::pair<int, int> measure_text(const std::vector<std::string>& lines, int font_size);

/// Level-set walk from the head: per step x += 2d (d = -1 on the left half,
/// +1 otherwise) and y -= 0.1, sampling by nearest pixel, while the sample
/// stays inside the frame and >= L0 - 0.1|L0|. Returns the last valid point,
/// floored. The map must already be at image dims.
std::pair<int, int> find_edge_point(int head_x, int head_y, const Heatmap& lam);

struct BubblePlacement {
    std::string character_id;
    std::string text;  // original dialogue
    std::vector<std::string> wrapped_text;
    int x_b = 0, y_b = 0;  // top-left, post-clamp
    int w_bubble = 0, h_bubble = 0;
    int edge_x = 0, edge_y = 0;  // tail tip
    int head_x = 0, head_y = 0;
    int font_size = 16;
    // Raw position before the frame clamp; records which side the rule chose.
    int unclamped_x_b = 0, unclamped_y_b = 0;
};

struct BubbleOptions {
    int font_size_init = 16;
    int padding = 20;
    int max_words_per_line = 4;
    int h_min = 0;     // raw vertical positions below this snap to 0
    int epsilon = 10;  // min gap between bubble top and the edge point
};

/// Wrap, measure, shrink the font by 2 while the bubble is wider than 0.4 W
/// (floor 6), side-select (left-half head: x - 60 - W_b, else x + 60), lift
/// above the head, dodge the edge point, clamp.
BubblePlacement place_bubble(const CharacterSpec& character, const HeadLocation& head,
                             const std::string& dialogue, int image_w, int image_h,
                             const BubbleOptions& opts = {});

struct ResolveResult {
    std::vector<BubblePlacement> bubbles;
    bool unresolved = false;  // conflicts survived every pass
    int passes = 0;
};

/// Ordered-pair repair, at most 3 passes, each pass re-clamped: a bubble
/// whose ellipse covers a foreign head moves toward the frame center and
/// below its edge point; overlapping rectangles push the second bubble down.
ResolveResult resolve_conflicts(std::vector<BubblePlacement> bubbles, int image_w, int image_h);

bool ellipse_contains(const BubblePlacement& b, int px, int py);
bool rects_overlap(const BubblePlacement& a, const BubblePlacement& b);

/// Paints each bubble: black ellipse outline (2 px) with white fill, white
/// tail triangle toward the edge point with black long edges, centered text.
/// Returns one GlyphMissing warning per distinct uncovered code point.
std::vector<std::string> draw_bubbles(Image* image, const std::vector<BubblePlacement>& bubbles,
                                      const GlyphProvider& font);

/// Bilinear resample of a single-channel map (align-corners false); the same
/// arithmetic get_location uses to build its logits.
Heatmap resample_bilinear(const Heatmap& src, int out_w, int out_h);

}  // namespace taleforge
