#!/usr/bin/env python3
"""Regenerates src/font8x16.cpp from DejaVu Sans Mono.

Each ASCII glyph (32..126) is rasterized into an 8x16 cell, one byte per
row, MSB = leftmost pixel. Run from the repo root:

    python3 tools/gen_font8x16.py > src/font8x16.cpp
"""
from PIL import Image, ImageDraw, ImageFont

FONT_PATH = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf"
CELL_W, CELL_H = 8, 16


def render_glyph(font, ch):
    img = Image.new("L", (CELL_W * 4, CELL_H * 4), 0)
    draw = ImageDraw.Draw(img)
    draw.text((1, 1), ch, fill=255, font=font)
    bbox = img.getbbox()
    cell = Image.new("L", (CELL_W, CELL_H), 0)
    if bbox is not None:
        ascent, _ = font.getmetrics()
        # align baselines: crop the full-height band so vertical position is kept
        band = img.crop((bbox[0], 1, bbox[2], 1 + CELL_H + 2))
        band = band.resize((min(CELL_W, max(1, bbox[2] - bbox[0])), CELL_H - 2), Image.LANCZOS)
        cell.paste(band, ((CELL_W - band.width) // 2, 1))
    rows = []
    for y in range(CELL_H):
        byte = 0
        for x in range(CELL_W):
            if cell.getpixel((x, y)) >= 96:
                byte |= 0x80 >> x
        rows.append(byte)
    return rows


def main():
    font = ImageFont.truetype(FONT_PATH, 13)
    print("// Copyright (C) 2026 TaleForge Authors")
    print("// SPDX-License-Identifier: Apache-2.0")
    print("//")
    print("// 8x16 ASCII bitmap font (codepoints 32..126), one byte per row,")
    print("// MSB = leftmost pixel. Generated by tools/gen_font8x16.py from")
    print("// DejaVu Sans Mono (public-domain-style Bitstream Vera license).")
    print()
    print('#include "taleforge/glyphs.hpp"')
    print()
    print("namespace taleforge {")
    print()
    print("const unsigned char kFont8x16[95][16] = {")
    for cp in range(32, 127):
        rows = render_glyph(font, chr(cp))
        hexes = ", ".join(f"0x{b:02x}" for b in rows)
        name = chr(cp) if chr(cp) != "\\" else "backslash"
        print(f"    {{{hexes}}},  // '{name}'")
    print("};")
    print()
    print("}  // namespace taleforge")


if __name__ == "__main__":
    main()
