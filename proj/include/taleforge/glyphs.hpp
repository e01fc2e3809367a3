// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace taleforge {

/// Embedded 8x16 bitmap font, ASCII 32..126, one byte per row, MSB = leftmost.
extern const unsigned char kFont8x16[95][16];

struct Glyph {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // row-major, 1 = ink
};

/// Maps code points to bitmaps. The default provider serves the embedded
/// ASCII font; an atlas provider layers extra glyphs on top (atlas.pgm P5 +
/// atlas.map lines `<codepoint-hex> <x> <y> <w> <h>`).
class GlyphProvider {
public:
    GlyphProvider();

    /// Loads an atlas directory; added glyphs take precedence over ASCII.
    void load_atlas(const std::filesystem::path& dir);

    bool has(std::uint32_t codepoint) const;
    const Glyph& get(std::uint32_t codepoint) const;

    /// The hollow-box bitmap drawn for code points with no glyph.
    const Glyph& missing_box() const { return missing_; }

private:
    std::map<std::uint32_t, Glyph> glyphs_;
    Glyph missing_;
};

}  // namespace taleforge
