// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taleforge/bubbles.hpp"
#include "taleforge/latent.hpp"
#include "taleforge/narrative.hpp"

namespace taleforge {

struct BackendConfig {
    std::string kind = "mock";  // "mock" | "wire"
    std::string fixture;        // mock completions file
    WireConfig wire;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    int frames = 0;  // 0 = take the count from the story file
    int latent_height = 64, latent_width = 64, d_e = 64;
    int steps = 20;  // T
    double xi = 10.0, phi = 0.2;
    double lambda = 0.95;
    double delta_omega = 0.7;
    int lora_rank = 8;       // sigma
    double lora_alpha = 16.0;
    double guidance_scale = 7.5;
    double lr = 0.05;
    int k_candidates = 3;
    int max_layout_iters = 5;
    int n_char_tokens = 16;
    int mask_heads = 2, mask_layers = 4, mask_timesteps = 8;
    int attn_layers = 2;  // ICSA / RACA projection stack
    int image_upscale = 8;
    std::string image_format = "ppm";  // "ppm" | "png"
    bool strict_layout = false;
    std::string min_area_mode = "scaled";  // "scaled" | "literal" | "off"
    std::optional<double> min_area_fraction;
    BubbleOptions bubbles;
    double suppression_scale = 1.0;
    bool record_timings = false;
    std::string out_dir = "out";
    int workers = 1;
    BackendConfig backend;
    std::string demos_file;
    std::string heatmaps_dir;  // optional external head-map substitutes
};

/// Reads a JSON config; unknown keys and out-of-range values throw
/// ConfigError. Relative paths resolve against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical sorted-key JSON of every semantic field. Runtime knobs that
/// must not affect artifact bytes (out_dir, workers) are excluded.
std::string canonical_config_json(const PipelineConfig& config);

/// sha256 of the canonical serialization; stamped into the run manifest.
std::string config_hash(const PipelineConfig& config);

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config);

/// Expanded-story JSON: story text, characters, frames with dialogues.
std::string story_to_json(const StoryBundle& story);

/// Single-channel heatmap copy of a latent-grid mask.
Heatmap mask_to_heatmap(const Eigen::MatrixXd& m);

/// Foreground-over-background alpha blend: the composite mask is peak
/// normalized, bilinearly resampled to the image dims, and applied per
/// channel with round-half-up.
Image blend_panel(const Image& bg, const Image& fg, const Eigen::MatrixXd& composite);

struct PanelArtifact {
    int frame_index = 0;  // 1-based
    std::string error;    // empty on success
    std::string image_file, layout_file, maskset_file, z_fg_file, z_bg_file, bubbles_file;
    std::vector<std::string> mask_files;  // per box
    std::vector<double> layout_e_rec;
    std::vector<std::string> warnings;
    double elapsed_ms = 0.0;  // recorded only when config.record_timings
};

struct RunResult {
    std::vector<PanelArtifact> frames;
    std::string story_file;     // expanded story JSON, relative to out_dir
    std::string manifest_file;  // relative to out_dir
    bool any_failed = false;
    std::string run_error;  // pre-frame failure (expansion, setup)
};

/// Expand -> per frame: layout correction, masks, foreground optimization,
/// background denoising, decode, head location, bubbles, draw, write.
/// Frames run on a worker pool; every RNG stream derives from (seed, frame).
/// A frame failure is recorded and the others continue.
RunResult run_pipeline(const PipelineConfig& config, const StoryBundle& story,
                       LlmBackend& backend);

/// Convenience wrapper: loads the story and builds the configured backend.
RunResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& story_path);

}  // namespace taleforge
