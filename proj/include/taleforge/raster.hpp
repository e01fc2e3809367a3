// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scanline rasterizer. Every fill decides pixel membership by testing the
// half-pixel center (px + 0.5, py + 0.5) against the shape inequality, in
// double precision, multiplied-out form (no divisions), so an independent
// point-in-shape scan reproduces the same pixel set:
//   ellipse:  (cx' - cx)^2 * b^2 + (cy' - cy)^2 * a^2 <= a^2 * b^2
//   triangle: all three edge cross products >= 0 or all <= 0,
//             cross(a, b, p) = (bx-ax)*(py-ay) - (by-ay)*(px-ax)

#pragma once

#include <cstdint>

#include "taleforge/glyphs.hpp"
#include "taleforge/hmap.hpp"
#include "taleforge/image.hpp"

namespace taleforge {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

void fill_ellipse(Image& img, double cx, double cy, double a, double b, Rgb color);
void fill_triangle(Image& img, double x1, double y1, double x2, double y2, double x3, double y3,
                   Rgb color);

/// Bresenham line, clipped to the canvas.
void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb color);

/// Paints a glyph at integer scale; (x, y) is the top-left corner.
void blit_glyph(Image& img, const Glyph& glyph, int x, int y, int scale, Rgb color);

/// Debug overlay: pixels where mask >= 0.5 are blended toward color by alpha.
/// Mask dims must equal image dims (1 channel).
void overlay_mask(Image& img, const Heatmap& mask, Rgb color, double alpha);

/// Alpha-blends color over every pixel using a per-pixel alpha map in [0,1].
void shade_by_map(Image& img, const Heatmap& alpha_map, Rgb color);

}  // namespace taleforge
