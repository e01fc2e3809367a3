// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace taleforge {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Splits on runs of non-alphanumeric ASCII bytes; multi-byte UTF-8
/// sequences are kept inside tokens. Returns lowercase tokens.
std::vector<std::string> tokenize(std::string_view s);

/// Splits on whitespace runs, keeping tokens verbatim.
std::vector<std::string> tokenize_ws(std::string_view s);

/// Splits a string on a single-character delimiter; keeps empty fields.
std::vector<std::string> split(std::string_view s, char delim);

/// Splits text into lines; accepts \n and \r\n, drops the terminators.
std::vector<std::string> split_lines(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

/// Decodes UTF-8 into Unicode code points. Invalid bytes decode as U+FFFD
/// (one replacement per bogus byte) so length stays deterministic.
std::vector<std::uint32_t> utf8_decode(std::string_view s);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace taleforge
