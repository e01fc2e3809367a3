// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/hmap.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "taleforge/errors.hpp"

namespace taleforge {

Heatmap make_heatmap(int height, int width, int channels, float fill) {
    Heatmap m;
    m.height = height;
    m.width = width;
    m.channels = channels;
    m.data.assign(static_cast<std::size_t>(height) * width * channels, fill);
    return m;
}

std::string hmap_to_bytes(const Heatmap& map) {
    std::string out = "HMAP1 " + std::to_string(map.height) + " " + std::to_string(map.width) +
                      " " + std::to_string(map.channels) + "\n";
    out.reserve(out.size() + map.data.size() * 4);
    for (float v : map.data) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
        out.push_back(static_cast<char>(bits & 0xff));
        out.push_back(static_cast<char>((bits >> 8) & 0xff));
        out.push_back(static_cast<char>((bits >> 16) & 0xff));
        out.push_back(static_cast<char>((bits >> 24) & 0xff));
    }
    return out;
}

namespace {

// Parses a positive decimal at *pos, advancing it. Throws on anything else.
int parse_dim(std::string_view bytes, std::size_t* pos, const char* what) {
    std::size_t start = *pos;
    long value = 0;
    while (*pos < bytes.size() && bytes[*pos] >= '0' && bytes[*pos] <= '9') {
        value = value * 10 + (bytes[*pos] - '0');
        if (value > std::numeric_limits<int>::max()) {
            throw FormatError(std::string("hmap: ") + what + " out of range", start);
        }
        ++(*pos);
    }
    if (*pos == start) {
        throw FormatError(std::string("hmap: expected ") + what, start);
    }
    if (value <= 0) {
        throw FormatError(std::string("hmap: ") + what + " must be positive", start);
    }
    return static_cast<int>(value);
}

void expect_byte(std::string_view bytes, std::size_t* pos, char c, const char* what) {
    if (*pos >= bytes.size() || bytes[*pos] != c) {
        throw FormatError(std::string("hmap: expected ") + what, *pos);
    }
    ++(*pos);
}

}  // namespace

Heatmap hmap_from_bytes(std::string_view bytes) {
    static constexpr std::string_view kMagic = "HMAP1 ";
    if (bytes.substr(0, kMagic.size()) != kMagic) {
        throw FormatError("hmap: bad magic", 0);
    }
    std::size_t pos = kMagic.size();
    int h = parse_dim(bytes, &pos, "height");
    expect_byte(bytes, &pos, ' ', "space after height");
    int w = parse_dim(bytes, &pos, "width");
    expect_byte(bytes, &pos, ' ', "space after width");
    int c = parse_dim(bytes, &pos, "channels");
    expect_byte(bytes, &pos, '\n', "newline after header");

    const std::size_t count = static_cast<std::size_t>(h) * w * c;
    const std::size_t need = pos + count * 4;
    if (bytes.size() < need) {
        // Report where the input ended; that is the first missing byte.
        throw FormatError("hmap: truncated payload", bytes.size());
    }
    if (bytes.size() > need) {
        throw FormatError("hmap: trailing bytes after payload", need);
    }
    Heatmap map = make_heatmap(h, w, c);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + i * 4);
        std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
        map.data[i] = std::bit_cast<float>(bits);
    }
    return map;
}

void save_hmap(const std::filesystem::path& path, const Heatmap& map) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("hmap: cannot open for write: " + path.string());
    std::string bytes = hmap_to_bytes(map);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("hmap: write failed: " + path.string());
}

Heatmap load_hmap(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("hmap: cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return hmap_from_bytes(bytes);
}

}  // namespace taleforge
