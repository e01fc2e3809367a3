// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/raster.hpp"

#include <algorithm>
#include <cmath>

#include "taleforge/errors.hpp"

namespace taleforge {

void fill_ellipse(Image& img, double cx, double cy, double a, double b, Rgb color) {
    if (a <= 0.0 || b <= 0.0) return;
    int x_lo = std::max(0, static_cast<int>(std::floor(cx - a)));
    int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(cx + a)));
    int y_lo = std::max(0, static_cast<int>(std::floor(cy - b)));
    int y_hi = std::min(img.height - 1, static_cast<int>(std::ceil(cy + b)));
    const double a2 = a * a;
    const double b2 = b * b;
    const double rhs = a2 * b2;
    for (int py = y_lo; py <= y_hi; ++py) {
        const double dy = (py + 0.5) - cy;
        for (int px = x_lo; px <= x_hi; ++px) {
            const double dx = (px + 0.5) - cx;
            if (dx * dx * b2 + dy * dy * a2 <= rhs) {
                img.set(px, py, color.r, color.g, color.b);
            }
        }
    }
}

namespace {

double edge_cross(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

void fill_triangle(Image& img, double x1, double y1, double x2, double y2, double x3, double y3,
                   Rgb color) {
    if (edge_cross(x1, y1, x2, y2, x3, y3) == 0.0) return;  // zero area
    int x_lo = std::max(0, static_cast<int>(std::floor(std::min({x1, x2, x3}))));
    int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(std::max({x1, x2, x3}))));
    int y_lo = std::max(0, static_cast<int>(std::floor(std::min({y1, y2, y3}))));
    int y_hi = std::min(img.height - 1, static_cast<int>(std::ceil(std::max({y1, y2, y3}))));
    for (int py = y_lo; py <= y_hi; ++py) {
        const double cyp = py + 0.5;
        for (int px = x_lo; px <= x_hi; ++px) {
            const double cxp = px + 0.5;
            double d1 = edge_cross(x1, y1, x2, y2, cxp, cyp);
            double d2 = edge_cross(x2, y2, x3, y3, cxp, cyp);
            double d3 = edge_cross(x3, y3, x1, y1, cxp, cyp);
            bool all_nonneg = d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
            bool all_nonpos = d1 <= 0.0 && d2 <= 0.0 && d3 <= 0.0;
            if (all_nonneg || all_nonpos) {
                img.set(px, py, color.r, color.g, color.b);
            }
        }
    }
}

void draw_line(Image& img, int x0, int y0, int x1, int y1, Rgb color) {
    int dx = std::abs(x1 - x0);
    int dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1;
    int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (img.in_bounds(x0, y0)) img.set(x0, y0, color.r, color.g, color.b);
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void blit_glyph(Image& img, const Glyph& glyph, int x, int y, int scale, Rgb color) {
    if (scale < 1) scale = 1;
    for (int r = 0; r < glyph.height; ++r) {
        for (int c = 0; c < glyph.width; ++c) {
            if (!glyph.bits[static_cast<std::size_t>(r) * glyph.width + c]) continue;
            for (int sy = 0; sy < scale; ++sy) {
                for (int sx = 0; sx < scale; ++sx) {
                    int px = x + c * scale + sx;
                    int py = y + r * scale + sy;
                    if (img.in_bounds(px, py)) img.set(px, py, color.r, color.g, color.b);
                }
            }
        }
    }
}

namespace {

std::uint8_t blend_channel(std::uint8_t base, std::uint8_t over, double alpha) {
    double v = base + alpha * (static_cast<double>(over) - base);
    v = std::clamp(v, 0.0, 255.0);
    // round half away from zero, deterministic across platforms
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

}  // namespace

void overlay_mask(Image& img, const Heatmap& mask, Rgb color, double alpha) {
    if (mask.height != img.height || mask.width != img.width || mask.channels != 1) {
        throw DimMismatch("overlay_mask: mask dims do not match image");
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (mask.at(y, x) < 0.5f) continue;
            const std::uint8_t* p = img.px(x, y);
            img.set(x, y, blend_channel(p[0], color.r, alpha), blend_channel(p[1], color.g, alpha),
                    blend_channel(p[2], color.b, alpha));
        }
    }
}

void shade_by_map(Image& img, const Heatmap& alpha_map, Rgb color) {
    if (alpha_map.height != img.height || alpha_map.width != img.width ||
        alpha_map.channels != 1) {
        throw DimMismatch("shade_by_map: map dims do not match image");
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double a = std::clamp(static_cast<double>(alpha_map.at(y, x)), 0.0, 1.0);
            if (a <= 0.0) continue;
            const std::uint8_t* p = img.px(x, y);
            img.set(x, y, blend_channel(p[0], color.r, a), blend_channel(p[1], color.g, a),
                    blend_channel(p[2], color.b, a));
        }
    }
}

}  // namespace taleforge
