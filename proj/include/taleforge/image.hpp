// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace taleforge {

/// 8-bit RGB raster, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // size width*height*3

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }

    const std::uint8_t* px(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

Image make_image(int width, int height, std::uint8_t r = 255, std::uint8_t g = 255,
                 std::uint8_t b = 255);

/// PPM P6 serialization: `P6\n<w> <h>\n255\n` + RGB bytes, bit-exact.
std::string ppm_to_bytes(const Image& img);
Image ppm_from_bytes(std::string_view bytes);

enum class ImageFormat { Ppm, Png };

void write_image(const Image& img, const std::filesystem::path& path,
                 ImageFormat format = ImageFormat::Ppm);
Image read_ppm(const std::filesystem::path& path);

/// Minimal PNG encoder (8-bit RGB, filter 0 scanlines, zlib stream).
std::string png_to_bytes(const Image& img);

}  // namespace taleforge
