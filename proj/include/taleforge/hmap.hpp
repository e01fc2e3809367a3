// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// HMAP1: a minimal float heatmap container.
//   header: "HMAP1 <H> <W> <C>\n"  (ASCII decimals, single spaces)
//   payload: H*W*C little-endian float32, row-major, channel-minor
//            (index = (r*W + c)*C + ch)

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace taleforge {

struct Heatmap {
    int height = 0;
    int width = 0;
    int channels = 1;
    std::vector<float> data;  // size height*width*channels

    float& at(int r, int c, int ch = 0) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    float at(int r, int c, int ch = 0) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::size_t size() const { return data.size(); }
};

Heatmap make_heatmap(int height, int width, int channels = 1, float fill = 0.0f);

/// Serializes to the HMAP1 byte format.
std::string hmap_to_bytes(const Heatmap& map);

/// Parses an HMAP1 byte stream. Throws FormatError (with the offending byte
/// offset) on a bad magic, malformed header, or truncated payload.
Heatmap hmap_from_bytes(std::string_view bytes);

void save_hmap(const std::filesystem::path& path, const Heatmap& map);
Heatmap load_hmap(const std::filesystem::path& path);

}  // namespace taleforge
