// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taleforge/layout.hpp"

namespace taleforge {

struct TokenEmbeddings {
    std::vector<std::string> tokens;       // begin/end markers included
    Eigen::MatrixXd vectors;               // n_tokens x d_e, unit rows
    std::vector<bool> content_mask;        // false for the markers
};

struct RegionQueries {
    Eigen::MatrixXd grid;                            // n_pixels x d_e
    std::vector<std::pair<int, int>> pixel_coords;   // (row, col), row-major
};

using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct SaliencyMask {
    Eigen::MatrixXd a_bar;      // H_lat x W_lat saliency
    Eigen::MatrixXd m_init;     // L1-normalized soft mask
    Eigen::MatrixXd m_refined;  // foreground-restricted mask
    BoolGrid p_fg;
    double eta = 0.0;
    std::vector<std::string> warnings;
};

struct MaskSet {
    std::vector<SaliencyMask> per_character;
    Eigen::MatrixXd composite;  // max_j eta_j * m_refined_j
};

struct LatentDims {
    int height = 64;
    int width = 64;
};

/// Toy text encoder: whitespace tokens wrapped in begin/end markers; each
/// token's vector is a seeded unit vector keyed by (token text, seed).
TokenEmbeddings encode_tokens(const std::string& text, std::uint64_t seed, int d_e = 64);

/// Positional encoder: per pixel strictly inside the box (center test),
/// sinusoidal features of (row/H, col/W) and of the box corners at 8
/// octave frequencies, projected to d_e by a seeded matrix.
RegionQueries encode_region(const LayoutBox& box, LatentDims dims, std::uint64_t seed,
                            int d_e = 64);

struct AttentionResult {
    Eigen::MatrixXd probs;   // n_pixels x n_tokens, rows sum to 1
    Eigen::MatrixXd output;  // n_pixels x d_e
};

AttentionResult bounded_attention(const RegionQueries& queries, const TokenEmbeddings& keys);

/// Mean over calls of the per-pixel content-token probability mass,
/// scattered onto the latent grid (outside-box pixels stay 0).
Eigen::MatrixXd aggregate_attention(const std::vector<Eigen::MatrixXd>& per_call_probs,
                                    const std::vector<bool>& content_mask,
                                    const std::vector<std::pair<int, int>>& pixel_coords,
                                    LatentDims dims);

/// 1-D 2-means over in-box saliency values (min/max init, <=50 iterations,
/// ties to the lower cluster); constant in-box maps fall back to the top
/// 0.8-quantile rule (first pixels in row-major order). Outside-box pixels
/// are background in both outputs.
std::pair<BoolGrid, BoolGrid> cluster_fg_bg(const Eigen::MatrixXd& a_bar,
                                            const std::vector<std::pair<int, int>>& pixel_coords);

/// m_init = L1norm(sigmoid(xi * L1norm(a_bar - phi))); the inner norm
/// divides by the sum of absolute values (zero sum gives the zero map).
Eigen::MatrixXd init_mask(const Eigen::MatrixXd& a_bar, double xi = 10.0, double phi = 0.2);

/// m_refined = (m_init restricted to p_fg) / min(sum m_init, |p_fg|).
/// Empty foreground yields the zero mask and sets *warning.
Eigen::MatrixXd refine_mask(const Eigen::MatrixXd& m_init, const BoolGrid& p_fg,
                            std::string* warning = nullptr);

/// eta_j = |support_j| / |union support|; composite = max_j eta_j * m_j.
MaskSet compose_masks(std::vector<SaliencyMask> per_character);

struct MaskGenOptions {
    int n_heads = 2;
    int n_layers = 4;
    int n_timesteps = 8;
    int d_e = 64;
    double xi = 10.0;
    double phi = 0.2;
};

/// Full per-frame mask pipeline. Per-call query jitter (std 0.1) is keyed by
/// (box seed, head, layer, timestep) so the aggregate is independent of call
/// order; per-box streams derive from (seed, box index).
MaskSet generate_masks(const FrameLayout& layout, LatentDims dims, std::uint64_t seed,
                       const MaskGenOptions& opts = {});

}  // namespace taleforge
