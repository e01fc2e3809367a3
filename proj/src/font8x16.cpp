// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// 8x16 ASCII bitmap font (codepoints 32..126), one byte per row,
// MSB = leftmost pixel. Generated by tools/gen_font8x16.py from
// DejaVu Sans Mono (public-domain-style Bitstream Vera license).

#include "taleforge/glyphs.hpp"

namespace taleforge {

const unsigned char kFont8x16[95][16] = {
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // ' '
    {0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x18, 0x18, 0x10, 0x00, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // '!'
    {0x00, 0x00, 0x00, 0x00, 0x2c, 0x2c, 0x2c, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '"'
    {0x00, 0x00, 0x00, 0x12, 0x16, 0x7e, 0x7f, 0x24, 0xfe, 0x68, 0x48, 0x00, 0x00, 0x00, 0x00, 0x00},  // '#'
    {0x00, 0x00, 0x00, 0x00, 0x10, 0x78, 0xc0, 0x70, 0x3c, 0x04, 0xfc, 0x30, 0x00, 0x00, 0x00, 0x00},  // '$'
    {0x00, 0x00, 0x00, 0x00, 0x70, 0x90, 0xf2, 0x38, 0x4e, 0x1b, 0x0e, 0x00, 0x00, 0x00, 0x00, 0x00},  // '%'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x60, 0x30, 0x59, 0xcf, 0xc6, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // '&'
    {0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '''
    {0x00, 0x00, 0x00, 0x08, 0x18, 0x10, 0x10, 0x10, 0x10, 0x10, 0x08, 0x08, 0x00, 0x00, 0x00, 0x00},  // '('
    {0x00, 0x00, 0x00, 0x10, 0x18, 0x08, 0x08, 0x08, 0x08, 0x18, 0x10, 0x30, 0x00, 0x00, 0x00, 0x00},  // ')'
    {0x00, 0x00, 0x00, 0x00, 0x10, 0x5c, 0x3c, 0x5e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '*'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x7e, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '+'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x10, 0x10, 0x00, 0x00, 0x00},  // ','
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '-'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // '.'
    {0x00, 0x00, 0x00, 0x00, 0x06, 0x04, 0x0c, 0x08, 0x10, 0x30, 0x20, 0x60, 0x40, 0x00, 0x00, 0x00},  // '/'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x46, 0x5a, 0x46, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '0'
    {0x00, 0x00, 0x00, 0x00, 0x38, 0x08, 0x08, 0x08, 0x08, 0x08, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // '1'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x46, 0x06, 0x0c, 0x18, 0x30, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // '2'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x46, 0x06, 0x3c, 0x06, 0x06, 0x7c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '3'
    {0x00, 0x00, 0x00, 0x00, 0x0c, 0x1c, 0x34, 0x64, 0x4c, 0x7e, 0x04, 0x00, 0x00, 0x00, 0x00, 0x00},  // '4'
    {0x00, 0x00, 0x00, 0x00, 0x7c, 0x60, 0x78, 0x0c, 0x06, 0x06, 0x7c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '5'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x60, 0x58, 0x66, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '6'
    {0x00, 0x00, 0x00, 0x00, 0x7e, 0x04, 0x0c, 0x08, 0x18, 0x10, 0x30, 0x00, 0x00, 0x00, 0x00, 0x00},  // '7'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x66, 0x3c, 0x66, 0x46, 0x7c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '8'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x46, 0x66, 0x3e, 0x06, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // '9'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x00, 0x00, 0x10, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // ':'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x00, 0x00, 0x00, 0x18, 0x10, 0x10, 0x00, 0x00, 0x00},  // ';'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x0e, 0x70, 0x70, 0x0e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '<'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x7e, 0x00, 0x00, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '='
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x70, 0x0e, 0x0e, 0x70, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '>'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x06, 0x04, 0x18, 0x10, 0x00, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // '?'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x62, 0xcf, 0x9b, 0x93, 0x9f, 0x40, 0x60, 0x1c, 0x00, 0x00, 0x00},  // '@'
    {0x00, 0x00, 0x00, 0x00, 0x18, 0x38, 0x2c, 0x24, 0x66, 0x7e, 0xc2, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'A'
    {0x00, 0x00, 0x00, 0x00, 0xf8, 0x8c, 0x8c, 0xf8, 0xcc, 0x84, 0xfc, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'B'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x62, 0x60, 0x40, 0x40, 0x60, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'C'
    {0x00, 0x00, 0x00, 0x00, 0x78, 0x46, 0x46, 0x42, 0x46, 0x46, 0x7c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'D'
    {0x00, 0x00, 0x00, 0x00, 0x7e, 0x60, 0x60, 0x7e, 0x60, 0x60, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'E'
    {0x00, 0x00, 0x00, 0x00, 0xfc, 0xc0, 0xc0, 0xfc, 0xc0, 0xc0, 0xc0, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'F'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x60, 0x40, 0x4e, 0x42, 0x62, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'G'
    {0x00, 0x00, 0x00, 0x00, 0x42, 0x42, 0x42, 0x7e, 0x46, 0x42, 0x42, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'H'
    {0x00, 0x00, 0x00, 0x00, 0x7e, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'I'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x04, 0x04, 0x04, 0x04, 0x4c, 0x78, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'J'
    {0x00, 0x00, 0x00, 0x00, 0x46, 0x4c, 0x58, 0x78, 0x4c, 0x44, 0x42, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'K'
    {0x00, 0x00, 0x00, 0x00, 0xc0, 0xc0, 0xc0, 0xc0, 0xc0, 0xc0, 0xfc, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'L'
    {0x00, 0x00, 0x00, 0x00, 0xe6, 0xe6, 0xee, 0xda, 0xda, 0xc2, 0xc2, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'M'
    {0x00, 0x00, 0x00, 0x00, 0x62, 0x62, 0x52, 0x5a, 0x4a, 0x4e, 0x46, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'N'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x42, 0x42, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'O'
    {0x00, 0x00, 0x00, 0x00, 0xf8, 0xcc, 0xc4, 0xcc, 0xf8, 0xc0, 0xc0, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'P'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x66, 0x42, 0x42, 0x42, 0x66, 0x3c, 0x0c, 0x04, 0x00, 0x00, 0x00},  // 'Q'
    {0x00, 0x00, 0x00, 0x00, 0x7c, 0x46, 0x46, 0x7c, 0x4c, 0x46, 0x43, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'R'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x60, 0x60, 0x3c, 0x06, 0x06, 0x7c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'S'
    {0x00, 0x00, 0x00, 0x00, 0xff, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'T'
    {0x00, 0x00, 0x00, 0x00, 0x42, 0x46, 0x46, 0x46, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'U'
    {0x00, 0x00, 0x00, 0x00, 0xc2, 0x42, 0x66, 0x24, 0x2c, 0x38, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'V'
    {0x00, 0x00, 0x00, 0x00, 0x83, 0xc3, 0xda, 0x5a, 0x7a, 0x66, 0x66, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'W'
    {0x00, 0x00, 0x00, 0x00, 0x42, 0x24, 0x3c, 0x18, 0x3c, 0x66, 0xc2, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'X'
    {0x00, 0x00, 0x00, 0x00, 0x42, 0x66, 0x3c, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'Y'
    {0x00, 0x00, 0x00, 0x00, 0x7e, 0x06, 0x0c, 0x18, 0x30, 0x20, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'Z'
    {0x00, 0x00, 0x18, 0x18, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1c, 0x00, 0x00, 0x00, 0x00},  // '['
    {0x00, 0x00, 0x00, 0x00, 0x40, 0x60, 0x20, 0x30, 0x18, 0x08, 0x0c, 0x04, 0x06, 0x00, 0x00, 0x00},  // 'backslash'
    {0x00, 0x00, 0x38, 0x18, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x38, 0x00, 0x00, 0x00, 0x00},  // ']'
    {0x00, 0x00, 0x00, 0x00, 0x18, 0x3c, 0x66, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '^'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xfe, 0xff, 0x00, 0x00},  // '_'
    {0x00, 0x00, 0x00, 0x10, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '`'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x7c, 0x06, 0x7e, 0x46, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'a'
    {0x00, 0x00, 0x00, 0xc0, 0xc0, 0xd0, 0xf8, 0xcc, 0x84, 0xcc, 0xf8, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'b'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x3e, 0x60, 0x60, 0x60, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'c'
    {0x00, 0x00, 0x00, 0x06, 0x06, 0x16, 0x7e, 0x46, 0x46, 0x46, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'd'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x3c, 0x62, 0x7e, 0x40, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'e'
    {0x00, 0x00, 0x06, 0x1c, 0x10, 0x3c, 0x7e, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'f'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x7e, 0x46, 0x46, 0x66, 0x3e, 0x06, 0x3c, 0x18, 0x00, 0x00},  // 'g'
    {0x00, 0x00, 0x00, 0x60, 0x60, 0x68, 0x7c, 0x66, 0x66, 0x66, 0x66, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'h'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x20, 0x38, 0x18, 0x18, 0x18, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'i'
    {0x00, 0x00, 0x04, 0x04, 0x00, 0x18, 0x1c, 0x04, 0x04, 0x04, 0x04, 0x04, 0x1c, 0x38, 0x00, 0x00},  // 'j'
    {0x00, 0x00, 0x00, 0xc0, 0xc0, 0xc0, 0xd8, 0xf0, 0xf0, 0xc8, 0xcc, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'k'
    {0x00, 0x00, 0x70, 0x70, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'l'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x04, 0x7e, 0x5a, 0x5a, 0x5a, 0x5a, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'm'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x7c, 0x66, 0x66, 0x66, 0x66, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'n'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x7c, 0x46, 0x42, 0x66, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'o'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0xf8, 0xcc, 0x84, 0xcc, 0xf8, 0x80, 0xc0, 0x00, 0x00, 0x00},  // 'p'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x7e, 0x46, 0x46, 0x66, 0x3e, 0x06, 0x06, 0x00, 0x00, 0x00},  // 'q'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x7c, 0x60, 0x60, 0x60, 0x60, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'r'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x3c, 0x60, 0x3c, 0x06, 0x3c, 0x00, 0x00, 0x00, 0x00, 0x00},  // 's'
    {0x00, 0x00, 0x00, 0x00, 0x10, 0x7c, 0x7c, 0x10, 0x10, 0x10, 0x1e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 't'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x66, 0x66, 0x66, 0x66, 0x3e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'u'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x46, 0x64, 0x24, 0x3c, 0x18, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'v'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xc3, 0xda, 0x5a, 0x6e, 0x64, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'w'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x66, 0x38, 0x18, 0x3c, 0x66, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'x'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x42, 0x66, 0x24, 0x3c, 0x18, 0x18, 0x30, 0x60, 0x00, 0x00},  // 'y'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x3e, 0x0c, 0x18, 0x20, 0x7e, 0x00, 0x00, 0x00, 0x00, 0x00},  // 'z'
    {0x00, 0x00, 0x04, 0x1c, 0x18, 0x18, 0x70, 0x30, 0x18, 0x18, 0x18, 0x0c, 0x00, 0x00, 0x00, 0x00},  // '{'
    {0x00, 0x00, 0x00, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x10, 0x00, 0x00, 0x00},  // '|'
    {0x00, 0x00, 0x20, 0x30, 0x18, 0x18, 0x0c, 0x1c, 0x18, 0x18, 0x10, 0x70, 0x00, 0x00, 0x00, 0x00},  // '}'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x70, 0x0e, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '~'
};

}  // namespace taleforge
