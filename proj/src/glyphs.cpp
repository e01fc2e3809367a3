// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/glyphs.hpp"

#include <fstream>
#include <sstream>

#include "taleforge/errors.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

namespace {

Glyph unpack_ascii(const unsigned char rows[16]) {
    Glyph g;
    g.width = 8;
    g.height = 16;
    g.bits.resize(8 * 16);
    for (int r = 0; r < 16; ++r) {
        for (int c = 0; c < 8; ++c) {
            g.bits[r * 8 + c] = (rows[r] >> (7 - c)) & 1;
        }
    }
    return g;
}

Glyph make_hollow_box() {
    Glyph g;
    g.width = 8;
    g.height = 16;
    g.bits.assign(8 * 16, 0);
    for (int c = 1; c < 7; ++c) {
        g.bits[2 * 8 + c] = 1;
        g.bits[13 * 8 + c] = 1;
    }
    for (int r = 2; r <= 13; ++r) {
        g.bits[r * 8 + 1] = 1;
        g.bits[r * 8 + 6] = 1;
    }
    return g;
}

}  // namespace

GlyphProvider::GlyphProvider() {
    for (int i = 0; i < 95; ++i) {
        glyphs_[static_cast<std::uint32_t>(32 + i)] = unpack_ascii(kFont8x16[i]);
    }
    missing_ = make_hollow_box();
}

void GlyphProvider::load_atlas(const std::filesystem::path& dir) {
    std::ifstream pgm(dir / "atlas.pgm", std::ios::binary);
    if (!pgm) throw IoError("glyphs: cannot open atlas.pgm in " + dir.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    pgm >> magic >> w >> h >> maxval;
    if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) {
        throw FormatError("glyphs: bad atlas.pgm header", 0);
    }
    pgm.get();  // single whitespace byte before payload
    std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * h);
    pgm.read(reinterpret_cast<char*>(gray.data()), static_cast<std::streamsize>(gray.size()));
    if (!pgm) throw FormatError("glyphs: truncated atlas.pgm", 0);

    std::ifstream map(dir / "atlas.map");
    if (!map) throw IoError("glyphs: cannot open atlas.map in " + dir.string());
    std::string line;
    while (std::getline(map, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cp_hex;
        int gx = 0, gy = 0, gw = 0, gh = 0;
        if (!(ls >> cp_hex >> gx >> gy >> gw >> gh)) {
            throw FormatError("glyphs: malformed atlas.map line: " + line, 0);
        }
        std::uint32_t cp = static_cast<std::uint32_t>(std::stoul(cp_hex, nullptr, 16));
        if (gx < 0 || gy < 0 || gw <= 0 || gh <= 0 || gx + gw > w || gy + gh > h) {
            throw FormatError("glyphs: atlas.map rect out of bounds: " + line, 0);
        }
        Glyph g;
        g.width = gw;
        g.height = gh;
        g.bits.resize(static_cast<std::size_t>(gw) * gh);
        for (int r = 0; r < gh; ++r) {
            for (int c = 0; c < gw; ++c) {
                g.bits[r * gw + c] = gray[(static_cast<std::size_t>(gy) + r) * w + gx + c] >= 128;
            }
        }
        glyphs_[cp] = std::move(g);
    }
}

bool GlyphProvider::has(std::uint32_t codepoint) const {
    return glyphs_.count(codepoint) != 0;
}

const Glyph& GlyphProvider::get(std::uint32_t codepoint) const {
    auto it = glyphs_.find(codepoint);
    return it == glyphs_.end() ? missing_ : it->second;
}

}  // namespace taleforge
