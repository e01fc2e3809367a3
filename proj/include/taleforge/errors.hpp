// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taleforge {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- story expansion ---

struct EmptyDemonstrations : Error {
    using Error::Error;
};

struct NoValidCandidate : Error {
    using Error::Error;
};

struct BackendError : Error {
    using Error::Error;
};

// --- layout ---

class LayoutParseError : public Error {
public:
    enum class Kind { TooManyBoxes, DegenerateBox, Malformed };

    LayoutParseError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct NoLayoutFound : Error {
    using Error::Error;
};

// --- mask generation / latents ---

struct DegenerateBox : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct AllMasksEmpty : Error {
    using Error::Error;
};

struct CharacterMaskMismatch : Error {
    using Error::Error;
};

struct NonFiniteEnergy : Error {
    using Error::Error;
};

struct NonFiniteLatent : Error {
    using Error::Error;
};

// --- bubbles / io ---

struct DimMismatch : Error {
    using Error::Error;
};

struct EmptyText : Error {
    using Error::Error;
};

struct BubbleLargerThanFrame : Error {
    using Error::Error;
};

class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t byte_offset)
        : Error(msg + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

struct IoError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace taleforge
