// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "taleforge/image.hpp"
#include "taleforge/hmap.hpp"
#include "taleforge/maskgen.hpp"
#include "taleforge/narrative.hpp"

namespace taleforge {

struct LatentTensor {
    enum class Role { Fg, Bg, Noise };
    int height = 0;
    int width = 0;
    Eigen::MatrixXd values;  // (height*width) x d_e, pixels row-major
    Role role = Role::Noise;

    int d_e() const { return static_cast<int>(values.cols()); }
    Eigen::Index pixels() const { return values.rows(); }
};

LatentTensor make_latent(int height, int width, int d_e, LatentTensor::Role role);
LatentTensor gaussian_latent(int height, int width, int d_e, LatentTensor::Role role,
                             std::uint64_t seed);

/// Round-trips through HMAP1 with C = d_e (float32 payload).
Heatmap latent_to_hmap(const LatentTensor& z);
LatentTensor latent_from_hmap(const Heatmap& map, LatentTensor::Role role);

/// Per-character feature matrices. Rows are seeded unit vectors keyed by the
/// physical description and row index, so identical descriptions share
/// features; each character also carries a seeded token-to-pixel permutation.
struct CharacterBank {
    std::vector<std::string> character_ids;
    std::vector<Eigen::MatrixXd> features;     // n_char_tokens x d_e each
    std::vector<std::vector<int>> token_perm;  // permutation of 0..n_char_tokens-1
    int n_char_tokens = 16;
    int d_e = 64;
};

CharacterBank build_character_db(const std::vector<CharacterSpec>& characters,
                                 int n_char_tokens, int d_e, std::uint64_t seed);

struct LayerProjections {
    Eigen::MatrixXd wq, wk, wv;  // d_e x d_e
};

struct AttentionProjections {
    std::vector<LayerProjections> layers;
    int d_e = 64;
};

/// Orthogonal init scaled by 1/sqrt(d_e).
AttentionProjections make_projections(int n_layers, int d_e, std::uint64_t seed);

struct LoraAdapter {
    Eigen::MatrixXd down;  // d_e x rank, zero-initialized
    Eigen::MatrixXd up;    // rank x d_e, Gaussian/sqrt(d_e)
    int rank = 8;
    double alpha = 16.0;

    Eigen::MatrixXd adapt(const Eigen::MatrixXd& base) const {
        if (down.isZero(0.0)) return base;  // exact identity while untrained
        return base + (alpha / rank) * (down * up);
    }
};

/// Adapters indexed [character][layer][projection], projection 0=q 1=k 2=v.
struct AdapterSet {
    std::vector<std::vector<std::array<LoraAdapter, 3>>> items;
};

AdapterSet make_adapters(int n_characters, int n_layers, int d_e, int rank, double alpha,
                         std::uint64_t seed);

struct IcsaResult {
    Eigen::MatrixXd attention;  // n_bank x n_char_tokens, rows sum to 1
    Eigen::MatrixXd output;     // n_bank x d_e
};

/// softmax((X W_q)(f_i W_k)^T / sqrt(d_e)) (f_i W_v) for one layer.
IcsaResult icsa(const Eigen::MatrixXd& x_bank, const Eigen::MatrixXd& f_i,
                const AttentionProjections& proj, int layer);

/// Masked guidance branch: per character, sum over layers of
/// eta_i m_i(p) * Z(p,c) * ICSA(token(p), c), with the character's ICSA
/// output placed on the grid by its token permutation (pixel p reads token
/// perm[p mod n_char_tokens]). One matrix per character.
std::vector<Eigen::MatrixXd> theta(const MaskSet& mask_set, const CharacterBank& bank,
                                   const LatentTensor& noise, const AttentionProjections& proj);

/// Blend of the adapted masked branch with the unconditional branch:
/// gs * delta_omega * masked(adapted) + (1-delta_omega)/L * sum_l 2*sigmoid(Z o ICSA_adapted).
/// Exact-zero blend weights skip their branch so delta_omega = 1 with
/// untrained adapters reproduces theta bitwise.
std::vector<Eigen::MatrixXd> theta_sigma(const MaskSet& mask_set, const CharacterBank& bank,
                                         const LatentTensor& noise,
                                         const AttentionProjections& proj,
                                         const AdapterSet& adapters, double delta_omega,
                                         double guidance_scale = 1.0);

double tensor_sq_distance(const std::vector<Eigen::MatrixXd>& a,
                          const std::vector<Eigen::MatrixXd>& b);

/// Squared Frobenius distance between the two guidance branches.
double fg_energy(const MaskSet& mask_set, const CharacterBank& bank, const LatentTensor& noise,
                 const AttentionProjections& proj, const AdapterSet& adapters,
                 double delta_omega, double guidance_scale = 1.0);

struct AdapterGrads {
    // same indexing as AdapterSet; first = d/d down, second = d/d up
    std::vector<std::vector<std::array<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>, 3>>> items;
};

/// Analytic gradient of fg_energy with respect to every adapter parameter.
AdapterGrads fg_energy_grad(const MaskSet& mask_set, const CharacterBank& bank,
                            const LatentTensor& noise, const AttentionProjections& proj,
                            const AdapterSet& adapters, double delta_omega,
                            double guidance_scale = 1.0);

struct StepEnergy {
    int t = 0;             // denoising step, counts down
    int update_index = 0;  // inner update within the step
    double before = 0.0;
    double after = 0.0;
};

struct OptimizeOptions {
    int steps = 20;  // T, >= 4
    double delta_omega = 0.7;
    double lr = 0.05;  // initial trial step; backtracking halves on ascent
    double guidance_scale = 1.0;
    int rank = 8;
    double alpha = 16.0;
};

struct OptimizeResult {
    LatentTensor z_fg;
    std::vector<StepEnergy> trace;
    AdapterSet adapters;
};

/// Gradient-fusion loop: t = T..1 with seeded noise, r(t) = 1 + round(4(t-1)/(T-1))
/// adapter updates per step (5 down to 1), masked composition into Z_fg during
/// the first ceil(T/4) steps only.
OptimizeResult optimize_fg_latent(const MaskSet& mask_set, const CharacterBank& bank,
                                  const AttentionProjections& proj, std::uint64_t seed,
                                  const OptimizeOptions& opts = {});

/// Region-aware cross-attention: row-L1-normalized sigmoid weights from
/// background queries to foreground keys, applied to foreground values.
Eigen::MatrixXd raca(const LatentTensor& z_bg, const LatentTensor& z_fg,
                     const AttentionProjections& proj, int layer);

struct DenoiseOptions {
    double lambda = 0.95;
    int steps = 20;
};

/// Objective whose gradient drives the background update: alignment of Z_bg
/// with the prompt token directions plus foreground-RACA coupling over layers.
double background_objective(const LatentTensor& z_bg, const LatentTensor& z_fg,
                            const Eigen::MatrixXd& h_tokens, const AttentionProjections& proj);

Eigen::MatrixXd background_objective_grad(const LatentTensor& z_bg, const LatentTensor& z_fg,
                                          const Eigen::MatrixXd& h_tokens,
                                          const AttentionProjections& proj);

/// Gradient descent Z <- Z - lambda * grad from a seeded Gaussian start.
LatentTensor denoise_background_core(const LatentTensor& z_fg, const Eigen::MatrixXd& h_tokens,
                                     const AttentionProjections& proj, std::uint64_t seed,
                                     const DenoiseOptions& opts = {});

/// Wrapper that encodes the prompt's content tokens into h_tokens.
LatentTensor denoise_background(const LatentTensor& z_fg, const std::string& bg_prompt,
                                const AttentionProjections& proj, std::uint64_t seed,
                                const DenoiseOptions& opts = {});

/// Seeded affine map d_e -> RGB with clamping, nearest-neighbor upscaled.
Image decode_latent(const LatentTensor& z, int upscale, std::uint64_t seed);

}  // namespace taleforge
