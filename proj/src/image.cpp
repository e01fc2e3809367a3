// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/image.hpp"

#include <zlib.h>

#include <fstream>
#include <limits>

#include "taleforge/errors.hpp"

namespace taleforge {

Image make_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

std::string ppm_to_bytes(const Image& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

namespace {

int parse_ppm_int(std::string_view bytes, std::size_t* pos, const char* what) {
    std::size_t start = *pos;
    long value = 0;
    while (*pos < bytes.size() && bytes[*pos] >= '0' && bytes[*pos] <= '9') {
        value = value * 10 + (bytes[*pos] - '0');
        if (value > std::numeric_limits<int>::max()) {
            throw FormatError(std::string("ppm: ") + what + " out of range", start);
        }
        ++(*pos);
    }
    if (*pos == start) throw FormatError(std::string("ppm: expected ") + what, start);
    return static_cast<int>(value);
}

void skip_ws(std::string_view bytes, std::size_t* pos) {
    while (*pos < bytes.size() &&
           (bytes[*pos] == ' ' || bytes[*pos] == '\t' || bytes[*pos] == '\n' ||
            bytes[*pos] == '\r')) {
        ++(*pos);
    }
}

}  // namespace

Image ppm_from_bytes(std::string_view bytes) {
    if (bytes.substr(0, 2) != "P6") throw FormatError("ppm: bad magic", 0);
    std::size_t pos = 2;
    skip_ws(bytes, &pos);
    int w = parse_ppm_int(bytes, &pos, "width");
    skip_ws(bytes, &pos);
    int h = parse_ppm_int(bytes, &pos, "height");
    skip_ws(bytes, &pos);
    std::size_t maxval_pos = pos;
    int maxval = parse_ppm_int(bytes, &pos, "maxval");
    if (maxval != 255) throw FormatError("ppm: unsupported maxval", maxval_pos);
    if (pos >= bytes.size()) throw FormatError("ppm: missing payload", pos);
    ++pos;  // single whitespace byte after maxval
    if (w <= 0 || h <= 0) throw FormatError("ppm: bad dimensions", 3);
    const std::size_t count = static_cast<std::size_t>(w) * h * 3;
    if (bytes.size() < pos + count) throw FormatError("ppm: truncated payload", bytes.size());
    if (bytes.size() > pos + count) {
        throw FormatError("ppm: trailing bytes after payload", pos + count);
    }
    Image img;
    img.width = w;
    img.height = h;
    img.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                      reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + count));
    return img;
}

namespace {

void png_chunk(std::string* out, const char type[4], const std::string& data) {
    auto put_u32 = [out](std::uint32_t v) {
        out->push_back(static_cast<char>((v >> 24) & 0xff));
        out->push_back(static_cast<char>((v >> 16) & 0xff));
        out->push_back(static_cast<char>((v >> 8) & 0xff));
        out->push_back(static_cast<char>(v & 0xff));
    };
    put_u32(static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out->append(body);
    std::uint32_t crc =
        crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(crc);
}

}  // namespace

std::string png_to_bytes(const Image& img) {
    std::string raw;
    raw.reserve(static_cast<std::size_t>(img.height) * (1 + static_cast<std::size_t>(img.width) * 3));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back('\0');  // filter type 0
        raw.append(reinterpret_cast<const char*>(img.px(0, y)),
                   static_cast<std::size_t>(img.width) * 3);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK) {
        throw IoError("png: compression failed");
    }
    compressed.resize(bound);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    auto put_u32 = [&ihdr](std::uint32_t v) {
        ihdr.push_back(static_cast<char>((v >> 24) & 0xff));
        ihdr.push_back(static_cast<char>((v >> 16) & 0xff));
        ihdr.push_back(static_cast<char>((v >> 8) & 0xff));
        ihdr.push_back(static_cast<char>(v & 0xff));
    };
    put_u32(static_cast<std::uint32_t>(img.width));
    put_u32(static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    png_chunk(&out, "IHDR", ihdr);
    png_chunk(&out, "IDAT", compressed);
    png_chunk(&out, "IEND", "");
    return out;
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("image: cannot open for write: " + path.string());
    std::string bytes = format == ImageFormat::Ppm ? ppm_to_bytes(img) : png_to_bytes(img);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("image: write failed: " + path.string());
}

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("image: cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return ppm_from_bytes(bytes);
}

}  // namespace taleforge
