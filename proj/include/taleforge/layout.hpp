// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taleforge/narrative.hpp"

namespace taleforge {

struct LayoutBox {
    std::string character_id;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // normalized to [0,1], x0<x1, y0<y1
};

struct FrameLayout {
    std::vector<LayoutBox> boxes;
    std::vector<std::string> fg_prompts;  // one per box
    std::string bg_prompt;
    std::vector<std::string> warnings;    // clips and non-strict constraint hits
};

struct ReconstructionError {
    double cos = 0;
    double jac = 0;
    double edit = 0;
    double e_rec = 0;
};

enum class MinAreaMode { Scaled, Literal, Off };

/// "literal" -> Literal, "off" -> Off, anything else -> Scaled.
MinAreaMode parse_min_area_mode(const std::string& name);

struct LayoutOptions {
    bool strict = false;
    MinAreaMode min_area_mode = MinAreaMode::Scaled;
    // Overrides the mode-derived threshold when set.
    std::optional<double> min_area_fraction;
};

/// Wire format: `BOX <character_id> <x0> <y0> <x1> <y1>` lines, `FG <i>
/// <prompt>` lines (1-based box index), one `BG <prompt>` line. Lines that
/// match none of the three prefixes are ignored (backend preamble drift).
/// Coordinates outside [0,1] clip with a warning; degenerate boxes after
/// clipping throw. Strict mode turns constraint warnings into errors.
FrameLayout parse_layout(const std::string& text, const LayoutOptions& opts = {});
std::string serialize_layout(const FrameLayout& layout);

std::string build_layout_prompt(const std::string& frame_desc,
                                const std::vector<CharacterSpec>& characters);
std::string build_refine_prompt(const std::string& frame_desc,
                                const std::vector<CharacterSpec>& characters,
                                const FrameLayout& previous, double previous_e_rec);

FrameLayout propose_layout(const std::string& frame_desc,
                           const std::vector<CharacterSpec>& characters, LlmBackend& backend,
                           std::uint64_t seed, const LayoutOptions& opts = {});

/// Deterministic layout-to-text template: per-box position phrases from
/// thirds of the box center, pairwise left-of/above relations when centers
/// differ by more than 0.15 on an axis, then the background prompt.
std::string reconstruct_caption(const FrameLayout& layout);

ReconstructionError reconstruction_error(const std::string& original,
                                         const std::string& reconstructed, double mu1 = 1.0,
                                         double mu2 = 1.0, double mu3 = 0.01);

/// Violation strings tagged TooManyBoxes / DegenerateBox / OutOfRange /
/// MinAreaViolation / PromptCountMismatch; empty list means valid.
std::vector<std::string> validate_layout(const FrameLayout& layout,
                                         const LayoutOptions& opts = {});

/// Propose-reconstruct-score loop. Stops at a perfect reconstruction
/// (e_rec = -1), when the running minimum stops improving, when successive
/// errors differ by less than 1e-4, or at max_iters. Returns the layout with
/// the minimum observed e_rec plus the full error trace.
std::pair<FrameLayout, std::vector<ReconstructionError>> correct_layout_iteratively(
    const std::string& frame_desc, const std::vector<CharacterSpec>& characters,
    LlmBackend& backend, int max_iters, std::uint64_t seed, const LayoutOptions& opts = {});

}  // namespace taleforge
