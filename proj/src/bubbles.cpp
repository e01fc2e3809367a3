// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "taleforge/errors.hpp"
#include "taleforge/raster.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

namespace {

// Row-major first-occurrence argmax (strict > keeps the earliest peak).
std::pair<int, int> argmax_rc(const Heatmap& m) {
    int best_r = 0, best_c = 0;
    float best = m.at(0, 0, 0);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            float v = m.at(r, c, 0);
            if (v > best) {
                best = v;
                best_r = r;
                best_c = c;
            }
        }
    }
    return {best_r, best_c};
}

Heatmap minmax_normalize(const Heatmap& m) {
    float lo = m.data[0], hi = m.data[0];
    for (float v : m.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Heatmap out = make_heatmap(m.height, m.width, 1);
    if (hi > lo) {
        for (std::size_t i = 0; i < m.data.size(); ++i) {
            out.data[i] = (m.data[i] - lo) / (hi - lo);
        }
    }
    return out;  // constant map stays all zeros
}

}  // namespace

Heatmap resample_bilinear(const Heatmap& src, int out_w, int out_h) {
    Heatmap out = make_heatmap(out_h, out_w, 1);
    double sx = static_cast<double>(src.width) / out_w;
    double sy = static_cast<double>(src.height) / out_h;
    for (int r = 0; r < out_h; ++r) {
        double fy = (r + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
        int y0 = static_cast<int>(std::floor(fy));
        int y1 = std::min(y0 + 1, src.height - 1);
        double wy = fy - y0;
        for (int c = 0; c < out_w; ++c) {
            double fx = (c + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
            int x0 = static_cast<int>(std::floor(fx));
            int x1 = std::min(x0 + 1, src.width - 1);
            double wx = fx - x0;
            double a = src.at(y0, x0, 0);
            double b = src.at(y0, x1, 0);
            double d = src.at(y1, x0, 0);
            double e = src.at(y1, x1, 0);
            double v = (1.0 - wy) * ((1.0 - wx) * a + wx * b) +
                       wy * ((1.0 - wx) * d + wx * e);
            out.data[static_cast<std::size_t>(r) * out_w + c] = static_cast<float>(v);
        }
    }
    return out;
}

HeadLocation get_location(int image_w, int image_h, const std::vector<Heatmap>& prompt_maps,
                          const std::vector<std::pair<int, int>>& used_locations,
                          const GetLocationOptions& opts) {
    if (prompt_maps.size() < 2) {
        throw DimMismatch("get_location: need the text map and the head map");
    }
    const Heatmap& base = prompt_maps[0];
    for (const Heatmap& m : prompt_maps) {
        if (m.channels != 1) throw DimMismatch("get_location: maps must be single-channel");
        if (m.height != base.height || m.width != base.width) {
            throw DimMismatch("get_location: prompt maps disagree on dims");
        }
    }
    Heatmap combined = base;
    for (std::size_t i = 1; i < prompt_maps.size(); ++i) {
        Heatmap norm = minmax_normalize(prompt_maps[i]);
        for (std::size_t k = 0; k < combined.data.size(); ++k) combined.data[k] *= norm.data[k];
    }

    auto [peak_r, peak_c] = argmax_rc(combined);
    // integer division floors the scaled coordinates
    int x = static_cast<int>(static_cast<std::int64_t>(peak_c) * image_w / base.width);
    int y = static_cast<int>(static_cast<std::int64_t>(peak_r) * image_h / base.height);

    HeadLocation loc;
    loc.logits = resample_bilinear(combined, image_w, image_h);

    double radius = 400.0 * opts.suppression_scale;
    int half = static_cast<int>(std::lround(50.0 * opts.suppression_scale));
    for (const auto& used : used_locations) {
        double dx = used.first - x;
        double dy = used.second - y;
        if (dx * dx + dy * dy < radius * radius) {
            int r0 = std::max(0, y - half), r1 = std::min(image_h, y + half);
            int c0 = std::max(0, x - half), c1 = std::min(image_w, x + half);
            for (int r = r0; r < r1; ++r) {
                for (int c = c0; c < c1; ++c) {
                    loc.logits.data[static_cast<std::size_t>(r) * image_w + c] *= 0.5f;
                }
            }
            auto [nr, nc] = argmax_rc(loc.logits);
            y = nr;
            x = nc;
        }
    }
    loc.x = x;
    loc.y = y;
    return loc;
}

std::vector<std::string> wrap_text(const std::string& text, int max_words_per_line) {
    if (max_words_per_line < 1) throw ConfigError("wrap_text: max words must be >= 1");
    std::vector<std::string> words = tokenize_ws(text);
    if (words.empty()) throw EmptyText("wrap_text: text has no words");
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < words.size(); i += max_words_per_line) {
        std::size_t end = std::min(words.size(), i + max_words_per_line);
        lines.push_back(join(std::vector<std::string>(words.begin() + static_cast<long>(i),
                                                      words.begin() + static_cast<long>(end)),
                             " "));
    }
    return lines;
}

std::pair<int, int> measure_text(const std::vector<std::string>& lines, int font_size) {
    int advance = static_cast<int>(std::ceil(0.6 * font_size));
    int line_h = static_cast<int>(std::ceil(1.2 * font_size));
    std::size_t longest = 0;
    for (const std::string& line : lines) longest = std::max(longest, utf8_length(line));
    return {static_cast<int>(longest) * advance, static_cast<int>(lines.size()) * line_h};
}

std::pair<int, int> find_edge_point(int head_x, int head_y, const Heatmap& lam) {
    const int w = lam.width, h = lam.height;
    if (head_x < 0 || head_x >= w || head_y < 0 || head_y >= h) {
        throw DimMismatch("find_edge_point: head outside the map");
    }
    double l0 = lam.at(head_y, head_x, 0);
    double level = l0 - 0.1 * std::abs(l0);
    int d = (2 * head_x < w) ? -1 : 1;
    double xe = head_x, ye = head_y;
    for (;;) {
        double nx = xe + 2.0 * d;
        double ny = ye - 0.1;
        int ix = static_cast<int>(std::lround(nx));
        int iy = static_cast<int>(std::lround(ny));
        if (ix < 0 || ix >= w || iy < 0 || iy >= h) break;
        if (!(lam.at(iy, ix, 0) >= level)) break;
        xe = nx;
        ye = ny;
    }
    return {static_cast<int>(std::floor(xe)), static_cast<int>(std::floor(ye))};
}

BubblePlacement place_bubble(const CharacterSpec& character, const HeadLocation& head,
                             const std::string& dialogue, int image_w, int image_h,
                             const BubbleOptions& opts) {
    if (head.logits.width != image_w || head.logits.height != image_h) {
        throw DimMismatch("place_bubble: head logits not at image dims");
    }
    BubblePlacement b;
    b.character_id = character.id;
    b.text = dialogue;
    b.head_x = head.x;
    b.head_y = head.y;
    b.wrapped_text = wrap_text(dialogue, opts.max_words_per_line);

    b.font_size = opts.font_size_init;
    auto [wt, ht] = measure_text(b.wrapped_text, b.font_size);
    b.w_bubble = wt + opts.padding;
    b.h_bubble = ht + opts.padding;
    while (b.w_bubble > 0.4 * image_w && b.font_size > 6) {
        b.font_size -= 2;
        std::tie(wt, ht) = measure_text(b.wrapped_text, b.font_size);
        b.w_bubble = wt + opts.padding;
        b.h_bubble = ht + opts.padding;
    }
    if (b.w_bubble > image_w || b.h_bubble > image_h) {
        throw BubbleLargerThanFrame("bubble " + std::to_string(b.w_bubble) + "x" +
                                    std::to_string(b.h_bubble) + " exceeds frame " +
                                    std::to_string(image_w) + "x" + std::to_string(image_h));
    }

    std::tie(b.edge_x, b.edge_y) = find_edge_point(head.x, head.y, head.logits);

    int xb = (2 * head.x < image_w) ? head.x - 60 - b.w_bubble : head.x + 60;
    int yb = head.y - 60 - b.h_bubble;
    if (yb < opts.h_min) yb = 0;
    if (std::abs(yb - b.edge_y) < opts.epsilon) yb = b.edge_y - b.h_bubble - 20;
    b.unclamped_x_b = xb;
    b.unclamped_y_b = yb;
    b.x_b = std::clamp(xb, 0, image_w - b.w_bubble);
    b.y_b = std::clamp(yb, 0, image_h - b.h_bubble);
    return b;
}

bool ellipse_contains(const BubblePlacement& b, int px, int py) {
    double a = b.w_bubble / 2.0, bb = b.h_bubble / 2.0;
    double dx = px - (b.x_b + a);
    double dy = py - (b.y_b + bb);
    return dx * dx * bb * bb + dy * dy * a * a <= a * a * bb * bb;
}

bool rects_overlap(const BubblePlacement& a, const BubblePlacement& b) {
    return a.x_b < b.x_b + b.w_bubble && b.x_b < a.x_b + a.w_bubble &&
           a.y_b < b.y_b + b.h_bubble && b.y_b < a.y_b + a.h_bubble;
}

ResolveResult resolve_conflicts(std::vector<BubblePlacement> bubbles, int image_w, int image_h) {
    auto clamp_all = [&] {
        for (BubblePlacement& b : bubbles) {
            b.x_b = std::clamp(b.x_b, 0, image_w - b.w_bubble);
            b.y_b = std::clamp(b.y_b, 0, image_h - b.h_bubble);
        }
    };
    auto any_conflict = [&] {
        for (std::size_t i = 0; i < bubbles.size(); ++i) {
            for (std::size_t j = 0; j < bubbles.size(); ++j) {
                if (i == j) continue;
                if (ellipse_contains(bubbles[i], bubbles[j].head_x, bubbles[j].head_y)) {
                    return true;
                }
                if (i < j && rects_overlap(bubbles[i], bubbles[j])) return true;
            }
        }
        return false;
    };

    ResolveResult res;
    int pass = 0;
    for (; pass < 3; ++pass) {
        if (!any_conflict()) break;
        for (std::size_t i = 0; i < bubbles.size(); ++i) {
            for (std::size_t j = 0; j < bubbles.size(); ++j) {
                if (i == j) continue;
                if (ellipse_contains(bubbles[i], bubbles[j].head_x, bubbles[j].head_y)) {
                    int toward = image_w - 2 * bubbles[i].x_b;  // sign of W/2 - x_b
                    int sgn = (toward > 0) - (toward < 0);
                    bubbles[i].x_b += 80 * sgn;
                    bubbles[i].y_b = bubbles[i].edge_y + bubbles[i].h_bubble + 80;
                }
                if (rects_overlap(bubbles[i], bubbles[j])) {
                    bubbles[j].y_b = bubbles[i].y_b + bubbles[i].h_bubble;
                }
            }
        }
        clamp_all();
    }
    res.unresolved = any_conflict();
    res.passes = pass;
    res.bubbles = std::move(bubbles);
    return res;
}

std::vector<std::string> draw_bubbles(Image* image, const std::vector<BubblePlacement>& bubbles,
                                      const GlyphProvider& font) {
    const Rgb black{0, 0, 0};
    const Rgb white{255, 255, 255};
    std::set<std::uint32_t> missing;
    for (const BubblePlacement& b : bubbles) {
        double a = b.w_bubble / 2.0, bb = b.h_bubble / 2.0;
        double cx = b.x_b + a, cy = b.y_b + bb;
        fill_ellipse(*image, cx, cy, a, bb, black);
        fill_ellipse(*image, cx, cy, a - 2.0, bb - 2.0, white);

        double theta = std::atan2(b.edge_y - cy, b.edge_x - cx);
        double p1x = cx + a * std::cos(theta - 0.15), p1y = cy + bb * std::sin(theta - 0.15);
        double p2x = cx + a * std::cos(theta + 0.15), p2y = cy + bb * std::sin(theta + 0.15);
        fill_triangle(*image, p1x, p1y, p2x, p2y, b.edge_x, b.edge_y, white);
        draw_line(*image, static_cast<int>(std::lround(p1x)), static_cast<int>(std::lround(p1y)),
                  b.edge_x, b.edge_y, black);
        draw_line(*image, static_cast<int>(std::lround(p2x)), static_cast<int>(std::lround(p2y)),
                  b.edge_x, b.edge_y, black);

        auto [wt, ht] = measure_text(b.wrapped_text, b.font_size);
        int advance = static_cast<int>(std::ceil(0.6 * b.font_size));
        int line_h = static_cast<int>(std::ceil(1.2 * b.font_size));
        int scale = std::max(1, b.font_size / 16);
        int top = b.y_b + (b.h_bubble - ht) / 2;
        for (std::size_t li = 0; li < b.wrapped_text.size(); ++li) {
            const std::string& line = b.wrapped_text[li];
            int lw = static_cast<int>(utf8_length(line)) * advance;
            int x = b.x_b + (b.w_bubble - lw) / 2;
            int y = top + static_cast<int>(li) * line_h;
            for (std::uint32_t cp : utf8_decode(line)) {
                if (!font.has(cp)) missing.insert(cp);
                blit_glyph(*image, font.get(cp), x, y, scale, black);
                x += advance;
            }
        }
        (void)wt;
    }
    std::vector<std::string> warnings;
    for (std::uint32_t cp : missing) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "U+%04X", cp);
        warnings.push_back(std::string("GlyphMissing: ") + buf);
    }
    return warnings;
}

}  // namespace taleforge
