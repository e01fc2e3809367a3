// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/latent.hpp"

#include <algorithm>
#include <cmath>

#include "taleforge/errors.hpp"
#include "taleforge/linalg.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

LatentTensor make_latent(int height, int width, int d_e, LatentTensor::Role role) {
    LatentTensor z;
    z.height = height;
    z.width = width;
    z.role = role;
    z.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(height) * width, d_e);
    return z;
}

LatentTensor gaussian_latent(int height, int width, int d_e, LatentTensor::Role role,
                             std::uint64_t seed) {
    LatentTensor z = make_latent(height, width, d_e, role);
    z.values = gaussian_matrix(z.values.rows(), d_e, seed);
    return z;
}

Heatmap latent_to_hmap(const LatentTensor& z) {
    Heatmap m = make_heatmap(z.height, z.width, z.d_e());
    for (Eigen::Index p = 0; p < z.pixels(); ++p) {
        for (int c = 0; c < z.d_e(); ++c) {
            m.data[static_cast<std::size_t>(p) * z.d_e() + c] =
                static_cast<float>(z.values(p, c));
        }
    }
    return m;
}

LatentTensor latent_from_hmap(const Heatmap& map, LatentTensor::Role role) {
    LatentTensor z = make_latent(map.height, map.width, map.channels, role);
    for (Eigen::Index p = 0; p < z.pixels(); ++p) {
        for (int c = 0; c < map.channels; ++c) {
            z.values(p, c) = map.data[static_cast<std::size_t>(p) * map.channels + c];
        }
    }
    return z;
}

CharacterBank build_character_db(const std::vector<CharacterSpec>& characters, int n_char_tokens,
                                 int d_e, std::uint64_t seed) {
    if (characters.empty()) throw ConfigError("build_character_db: no characters");
    CharacterBank bank;
    bank.n_char_tokens = n_char_tokens;
    bank.d_e = d_e;
    for (const auto& spec : characters) {
        std::uint64_t base = hash_combine(splitmix64(seed), fnv1a64(spec.physical_description));
        Eigen::MatrixXd f(n_char_tokens, d_e);
        for (int r = 0; r < n_char_tokens; ++r) {
            f.row(r) =
                unit_vector(d_e, hash_combine(base, static_cast<std::uint64_t>(r))).transpose();
        }
        std::vector<int> perm(static_cast<std::size_t>(n_char_tokens));
        for (int i = 0; i < n_char_tokens; ++i) perm[static_cast<std::size_t>(i)] = i;
        Rng rng(derive_seed(base, "token_perm"));
        for (int i = n_char_tokens - 1; i > 0; --i) {
            int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        bank.character_ids.push_back(spec.id);
        bank.features.push_back(std::move(f));
        bank.token_perm.push_back(std::move(perm));
    }
    return bank;
}

AttentionProjections make_projections(int n_layers, int d_e, std::uint64_t seed) {
    AttentionProjections proj;
    proj.d_e = d_e;
    double scale = 1.0 / std::sqrt(static_cast<double>(d_e));
    for (int l = 0; l < n_layers; ++l) {
        LayerProjections lp;
        lp.wq = orthogonal_matrix(d_e, derive_seed(seed, {static_cast<std::uint64_t>(l), 0})) *
                scale;
        lp.wk = orthogonal_matrix(d_e, derive_seed(seed, {static_cast<std::uint64_t>(l), 1})) *
                scale;
        lp.wv = orthogonal_matrix(d_e, derive_seed(seed, {static_cast<std::uint64_t>(l), 2})) *
                scale;
        proj.layers.push_back(std::move(lp));
    }
    return proj;
}

AdapterSet make_adapters(int n_characters, int n_layers, int d_e, int rank, double alpha,
                         std::uint64_t seed) {
    AdapterSet set;
    set.items.resize(static_cast<std::size_t>(n_characters));
    for (int i = 0; i < n_characters; ++i) {
        set.items[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n_layers));
        for (int l = 0; l < n_layers; ++l) {
            for (int p = 0; p < 3; ++p) {
                LoraAdapter a;
                a.rank = rank;
                a.alpha = alpha;
                a.down = Eigen::MatrixXd::Zero(d_e, rank);
                a.up = gaussian_matrix(rank, d_e,
                                       derive_seed(seed, {static_cast<std::uint64_t>(i),
                                                          static_cast<std::uint64_t>(l),
                                                          static_cast<std::uint64_t>(p)})) /
                       std::sqrt(static_cast<double>(d_e));
                set.items[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]
                         [static_cast<std::size_t>(p)] = std::move(a);
            }
        }
    }
    return set;
}

IcsaResult icsa(const Eigen::MatrixXd& x_bank, const Eigen::MatrixXd& f_i,
                const AttentionProjections& proj, int layer) {
    if (layer < 0 || layer >= static_cast<int>(proj.layers.size())) {
        throw ShapeMismatch("icsa: layer index out of range");
    }
    if (x_bank.cols() != proj.d_e || f_i.cols() != proj.d_e) {
        throw ShapeMismatch("icsa: feature dim mismatch");
    }
    const LayerProjections& lp = proj.layers[static_cast<std::size_t>(layer)];
    double scale = 1.0 / std::sqrt(static_cast<double>(proj.d_e));
    IcsaResult res;
    Eigen::MatrixXd q = x_bank * lp.wq;
    Eigen::MatrixXd k = f_i * lp.wk;
    res.attention = row_softmax(q * k.transpose() * scale);
    res.output = res.attention * (f_i * lp.wv);
    return res;
}

namespace {

struct LayerForward {
    Eigen::MatrixXd q, k, v, pm, out;  // token space
    Eigen::MatrixXd g;                 // P x d_e, grid mapped
};

LayerForward layer_forward(const Eigen::MatrixXd& f, const LayerProjections& lp,
                           const std::vector<int>& perm, Eigen::Index n_pixels) {
    LayerForward fw;
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.cols()));
    fw.q = f * lp.wq;
    fw.k = f * lp.wk;
    fw.v = f * lp.wv;
    fw.pm = row_softmax(fw.q * fw.k.transpose() * scale);
    fw.out = fw.pm * fw.v;
    const int n_ct = static_cast<int>(f.rows());
    fw.g.resize(n_pixels, f.cols());
    for (Eigen::Index p = 0; p < n_pixels; ++p) {
        fw.g.row(p) = fw.out.row(perm[static_cast<std::size_t>(p % n_ct)]);
    }
    return fw;
}

void add_masked(Eigen::MatrixXd* acc, const Eigen::VectorXd& w, const Eigen::MatrixXd& z,
                const Eigen::MatrixXd& g) {
    acc->noalias() += w.asDiagonal() * z.cwiseProduct(g);
}

Eigen::VectorXd mask_weights(const SaliencyMask& mask, Eigen::Index n_pixels) {
    Eigen::VectorXd w(n_pixels);
    Eigen::Index idx = 0;
    for (Eigen::Index r = 0; r < mask.m_refined.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.m_refined.cols(); ++c) {
            w(idx++) = mask.eta * mask.m_refined(r, c);
        }
    }
    return w;
}

void check_theta_inputs(const MaskSet& mask_set, const CharacterBank& bank,
                        const LatentTensor& noise) {
    if (mask_set.per_character.size() != bank.features.size()) {
        throw CharacterMaskMismatch("theta: " + std::to_string(mask_set.per_character.size()) +
                                    " masks for " + std::to_string(bank.features.size()) +
                                    " characters");
    }
    if (mask_set.composite.size() != noise.pixels() || noise.d_e() != bank.d_e) {
        throw ShapeMismatch("theta: latent dims inconsistent with masks or bank");
    }
}

std::array<LoraAdapter, 3> const& adapters_for(const AdapterSet& set, std::size_t i,
                                               std::size_t l) {
    return set.items[i][l];
}

LayerProjections adapted_layer(const LayerProjections& base, const std::array<LoraAdapter, 3>& a) {
    return {a[0].adapt(base.wq), a[1].adapt(base.wk), a[2].adapt(base.wv)};
}

}  // namespace

std::vector<Eigen::MatrixXd> theta(const MaskSet& mask_set, const CharacterBank& bank,
                                   const LatentTensor& noise, const AttentionProjections& proj) {
    check_theta_inputs(mask_set, bank, noise);
    const Eigen::Index n_px = noise.pixels();
    std::vector<Eigen::MatrixXd> result;
    result.reserve(bank.features.size());
    for (std::size_t i = 0; i < bank.features.size(); ++i) {
        Eigen::VectorXd w = mask_weights(mask_set.per_character[i], n_px);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        for (std::size_t l = 0; l < proj.layers.size(); ++l) {
            LayerForward fw = layer_forward(bank.features[i], proj.layers[l], bank.token_perm[i],
                                            n_px);
            add_masked(&acc, w, noise.values, fw.g);
        }
        result.push_back(std::move(acc));
    }
    return result;
}

std::vector<Eigen::MatrixXd> theta_sigma(const MaskSet& mask_set, const CharacterBank& bank,
                                         const LatentTensor& noise,
                                         const AttentionProjections& proj,
                                         const AdapterSet& adapters, double delta_omega,
                                         double guidance_scale) {
    check_theta_inputs(mask_set, bank, noise);
    if (adapters.items.size() != bank.features.size()) {
        throw CharacterMaskMismatch("theta_sigma: adapter set does not cover every character");
    }
    const Eigen::Index n_px = noise.pixels();
    const double n_layers = static_cast<double>(proj.layers.size());
    std::vector<Eigen::MatrixXd> result;
    result.reserve(bank.features.size());
    for (std::size_t i = 0; i < bank.features.size(); ++i) {
        Eigen::VectorXd w = mask_weights(mask_set.per_character[i], n_px);
        Eigen::MatrixXd first = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        for (std::size_t l = 0; l < proj.layers.size(); ++l) {
            LayerForward fw = layer_forward(
                bank.features[i], adapted_layer(proj.layers[l], adapters_for(adapters, i, l)),
                bank.token_perm[i], n_px);
            if (delta_omega != 0.0) add_masked(&first, w, noise.values, fw.g);
            if (delta_omega != 1.0) {
                second += 2.0 * sigmoid(noise.values.cwiseProduct(fw.g));
            }
        }
        Eigen::MatrixXd res;
        double cond_weight = guidance_scale * delta_omega;
        if (delta_omega == 0.0) {
            res = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        } else if (cond_weight == 1.0) {
            res = std::move(first);  // bitwise-identical path for the Eq. 5 reduction
        } else {
            res = cond_weight * first;
        }
        if (delta_omega != 1.0) res += ((1.0 - delta_omega) / n_layers) * second;
        result.push_back(std::move(res));
    }
    return result;
}

double tensor_sq_distance(const std::vector<Eigen::MatrixXd>& a,
                          const std::vector<Eigen::MatrixXd>& b) {
    if (a.size() != b.size()) throw ShapeMismatch("tensor_sq_distance: list sizes differ");
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) {
            throw ShapeMismatch("tensor_sq_distance: shape mismatch at " + std::to_string(i));
        }
        e += (a[i] - b[i]).squaredNorm();
    }
    return e;
}

double fg_energy(const MaskSet& mask_set, const CharacterBank& bank, const LatentTensor& noise,
                 const AttentionProjections& proj, const AdapterSet& adapters, double delta_omega,
                 double guidance_scale) {
    return tensor_sq_distance(
        theta(mask_set, bank, noise, proj),
        theta_sigma(mask_set, bank, noise, proj, adapters, delta_omega, guidance_scale));
}

AdapterGrads fg_energy_grad(const MaskSet& mask_set, const CharacterBank& bank,
                            const LatentTensor& noise, const AttentionProjections& proj,
                            const AdapterSet& adapters, double delta_omega,
                            double guidance_scale) {
    check_theta_inputs(mask_set, bank, noise);
    const Eigen::Index n_px = noise.pixels();
    const std::size_t n_layers = proj.layers.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(bank.d_e));
    std::vector<Eigen::MatrixXd> base = theta(mask_set, bank, noise, proj);

    AdapterGrads grads;
    grads.items.resize(adapters.items.size());
    for (std::size_t i = 0; i < adapters.items.size(); ++i) {
        grads.items[i].resize(n_layers);
    }

    for (std::size_t i = 0; i < bank.features.size(); ++i) {
        const Eigen::MatrixXd& f = bank.features[i];
        const std::vector<int>& perm = bank.token_perm[i];
        const int n_ct = static_cast<int>(f.rows());
        Eigen::VectorXd w = mask_weights(mask_set.per_character[i], n_px);

        // forward with stored intermediates
        std::vector<LayerForward> fws;
        fws.reserve(n_layers);
        Eigen::MatrixXd first = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        for (std::size_t l = 0; l < n_layers; ++l) {
            fws.push_back(layer_forward(
                f, adapted_layer(proj.layers[l], adapters_for(adapters, i, l)), perm, n_px));
            if (delta_omega != 0.0) add_masked(&first, w, noise.values, fws.back().g);
            if (delta_omega != 1.0) second += 2.0 * sigmoid(noise.values.cwiseProduct(fws.back().g));
        }
        Eigen::MatrixXd res;
        double cond_weight = guidance_scale * delta_omega;
        if (delta_omega == 0.0) {
            res = Eigen::MatrixXd::Zero(n_px, bank.d_e);
        } else if (cond_weight == 1.0) {
            res = first;
        } else {
            res = cond_weight * first;
        }
        if (delta_omega != 1.0) res += ((1.0 - delta_omega) / static_cast<double>(n_layers)) * second;

        Eigen::MatrixXd d_res = -2.0 * (base[i] - res);  // dE/d theta_sigma_i

        for (std::size_t l = 0; l < n_layers; ++l) {
            const LayerForward& fw = fws[l];
            Eigen::MatrixXd d_g = Eigen::MatrixXd::Zero(n_px, bank.d_e);
            if (delta_omega != 0.0) {
                d_g += cond_weight * (w.asDiagonal() * noise.values.cwiseProduct(d_res));
            }
            if (delta_omega != 1.0) {
                Eigen::MatrixXd s = sigmoid(noise.values.cwiseProduct(fw.g));
                Eigen::MatrixXd sp = s.cwiseProduct(Eigen::MatrixXd::Ones(n_px, bank.d_e) - s);
                d_g += ((1.0 - delta_omega) * 2.0 / static_cast<double>(n_layers)) *
                       d_res.cwiseProduct(noise.values).cwiseProduct(sp);
            }
            Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(n_ct, bank.d_e);
            for (Eigen::Index p = 0; p < n_px; ++p) {
                d_out.row(perm[static_cast<std::size_t>(p % n_ct)]) += d_g.row(p);
            }
            Eigen::MatrixXd d_v = fw.pm.transpose() * d_out;
            Eigen::MatrixXd d_pm = d_out * fw.v.transpose();
            Eigen::VectorXd rowdot = d_pm.cwiseProduct(fw.pm).rowwise().sum();
            Eigen::MatrixXd d_lg =
                fw.pm.cwiseProduct(d_pm - rowdot.replicate(1, fw.pm.cols()));
            Eigen::MatrixXd d_q = scale * (d_lg * fw.k);
            Eigen::MatrixXd d_k = scale * (d_lg.transpose() * fw.q);
            Eigen::MatrixXd d_wq = f.transpose() * d_q;
            Eigen::MatrixXd d_wk = f.transpose() * d_k;
            Eigen::MatrixXd d_wv = f.transpose() * d_v;

            const std::array<LoraAdapter, 3>& as = adapters_for(adapters, i, l);
            const Eigen::MatrixXd* d_ws[3] = {&d_wq, &d_wk, &d_wv};
            for (int p = 0; p < 3; ++p) {
                const LoraAdapter& a = as[static_cast<std::size_t>(p)];
                double s_ad = a.alpha / a.rank;
                grads.items[i][l][static_cast<std::size_t>(p)] = {
                    s_ad * (*d_ws[p] * a.up.transpose()),
                    s_ad * (a.down.transpose() * *d_ws[p])};
            }
        }
    }
    return grads;
}

namespace {

AdapterSet stepped(const AdapterSet& adapters, const AdapterGrads& grads, double step) {
    AdapterSet out = adapters;
    for (std::size_t i = 0; i < out.items.size(); ++i) {
        for (std::size_t l = 0; l < out.items[i].size(); ++l) {
            for (std::size_t p = 0; p < 3; ++p) {
                out.items[i][l][p].down -= step * grads.items[i][l][p].first;
                out.items[i][l][p].up -= step * grads.items[i][l][p].second;
            }
        }
    }
    return out;
}

}  // namespace

OptimizeResult optimize_fg_latent(const MaskSet& mask_set, const CharacterBank& bank,
                                  const AttentionProjections& proj, std::uint64_t seed,
                                  const OptimizeOptions& opts) {
    if (opts.steps < 4) throw ConfigError("optimize_fg_latent: steps must be >= 4");
    const int T = opts.steps;
    const int h_lat = static_cast<int>(mask_set.composite.rows());
    const int w_lat = static_cast<int>(mask_set.composite.cols());
    const int n_chars = static_cast<int>(bank.features.size());

    OptimizeResult result;
    result.adapters = make_adapters(n_chars, static_cast<int>(proj.layers.size()), bank.d_e,
                                    opts.rank, opts.alpha, derive_seed(seed, "lora"));
    result.z_fg = make_latent(h_lat, w_lat, bank.d_e, LatentTensor::Role::Fg);

    const std::uint64_t noise_base = derive_seed(seed, "noise");
    const int composing_steps = (T + 3) / 4;  // first quarter, rounded up

    for (int t = T; t >= 1; --t) {
        LatentTensor noise =
            gaussian_latent(h_lat, w_lat, bank.d_e, LatentTensor::Role::Noise,
                            derive_seed(noise_base, {static_cast<std::uint64_t>(t)}));
        int repeats = 1 + static_cast<int>(std::lround(4.0 * (t - 1) / (T - 1)));
        for (int u = 0; u < repeats; ++u) {
            double e0 = fg_energy(mask_set, bank, noise, proj, result.adapters,
                                  opts.delta_omega, opts.guidance_scale);
            if (!std::isfinite(e0)) {
                throw NonFiniteEnergy("optimize_fg_latent: energy " + std::to_string(e0) +
                                      " at t=" + std::to_string(t));
            }
            AdapterGrads grads = fg_energy_grad(mask_set, bank, noise, proj, result.adapters,
                                                opts.delta_omega, opts.guidance_scale);
            double step = opts.lr;
            double e1 = e0;
            bool applied = false;
            for (int h = 0; h < 20; ++h) {
                AdapterSet trial = stepped(result.adapters, grads, step);
                double e_trial = fg_energy(mask_set, bank, noise, proj, trial, opts.delta_omega,
                                           opts.guidance_scale);
                if (std::isfinite(e_trial) && e_trial <= e0) {
                    result.adapters = std::move(trial);
                    e1 = e_trial;
                    applied = true;
                    break;
                }
                step *= 0.5;
            }
            (void)applied;  // no improving step found: adapters stay, e1 == e0
            result.trace.push_back({t, u, e0, e1});
        }
        if (t > T - composing_steps) {
            std::vector<Eigen::MatrixXd> sigma =
                theta_sigma(mask_set, bank, noise, proj, result.adapters, opts.delta_omega,
                            opts.guidance_scale);
            result.z_fg.values.setZero();
            for (const auto& part : sigma) result.z_fg.values += part;
            Eigen::Index idx = 0;
            for (Eigen::Index r = 0; r < mask_set.composite.rows(); ++r) {
                for (Eigen::Index c = 0; c < mask_set.composite.cols(); ++c, ++idx) {
                    if (!(mask_set.composite(r, c) > 0.0)) result.z_fg.values.row(idx).setZero();
                }
            }
        }
    }
    if (!result.z_fg.values.allFinite()) {
        throw NonFiniteLatent("optimize_fg_latent: non-finite Z_fg");
    }
    return result;
}

namespace {

constexpr Eigen::Index kRacaBlock = 512;  // bounds the P x P working set

}  // namespace

Eigen::MatrixXd raca(const LatentTensor& z_bg, const LatentTensor& z_fg,
                     const AttentionProjections& proj, int layer) {
    if (layer < 0 || layer >= static_cast<int>(proj.layers.size())) {
        throw ShapeMismatch("raca: layer index out of range");
    }
    if (z_bg.d_e() != proj.d_e || z_fg.d_e() != proj.d_e) {
        throw ShapeMismatch("raca: latent dim does not match projections");
    }
    const LayerProjections& lp = proj.layers[static_cast<std::size_t>(layer)];
    const double scale = 1.0 / std::sqrt(static_cast<double>(proj.d_e));
    Eigen::MatrixXd k = z_fg.values * lp.wk;
    Eigen::MatrixXd v = z_fg.values * lp.wv;
    Eigen::MatrixXd out(z_bg.pixels(), proj.d_e);
    for (Eigen::Index r0 = 0; r0 < z_bg.pixels(); r0 += kRacaBlock) {
        Eigen::Index rows = std::min(kRacaBlock, z_bg.pixels() - r0);
        Eigen::MatrixXd q = z_bg.values.middleRows(r0, rows) * lp.wq;
        Eigen::MatrixXd s = sigmoid(q * k.transpose() * scale);
        Eigen::ArrayXd t = s.rowwise().sum().array();
        Eigen::MatrixXd w = (s.array().colwise() / t).matrix();
        out.middleRows(r0, rows) = w * v;
    }
    return out;
}

double background_objective(const LatentTensor& z_bg, const LatentTensor& z_fg,
                            const Eigen::MatrixXd& h_tokens, const AttentionProjections& proj) {
    double g = 0.0;
    if (h_tokens.rows() > 0) {
        Eigen::VectorXd hsum = h_tokens.colwise().sum().transpose();
        g += (z_bg.values * hsum).sum();
    }
    for (int l = 0; l < static_cast<int>(proj.layers.size()); ++l) {
        g += z_fg.values.cwiseProduct(raca(z_bg, z_fg, proj, l)).sum();
    }
    return g;
}

Eigen::MatrixXd background_objective_grad(const LatentTensor& z_bg, const LatentTensor& z_fg,
                                          const Eigen::MatrixXd& h_tokens,
                                          const AttentionProjections& proj) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(proj.d_e));
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(z_bg.pixels(), z_bg.d_e());
    if (h_tokens.rows() > 0) {
        Eigen::RowVectorXd hsum = h_tokens.colwise().sum();
        grad.rowwise() += hsum;
    }
    for (const LayerProjections& lp : proj.layers) {
        Eigen::MatrixXd k = z_fg.values * lp.wk;
        Eigen::MatrixXd v = z_fg.values * lp.wv;
        for (Eigen::Index r0 = 0; r0 < z_bg.pixels(); r0 += kRacaBlock) {
            Eigen::Index rows = std::min(kRacaBlock, z_bg.pixels() - r0);
            Eigen::MatrixXd q = z_bg.values.middleRows(r0, rows) * lp.wq;
            Eigen::MatrixXd s = sigmoid(q * k.transpose() * scale);
            Eigen::ArrayXd t = s.rowwise().sum().array();
            Eigen::MatrixXd w = (s.array().colwise() / t).matrix();
            Eigen::MatrixXd d_w = z_fg.values.middleRows(r0, rows) * v.transpose();
            Eigen::VectorXd rowdot = d_w.cwiseProduct(w).rowwise().sum();
            Eigen::MatrixXd d_s =
                ((d_w - rowdot.replicate(1, w.cols())).array().colwise() / t).matrix();
            Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(rows, s.cols());
            Eigen::MatrixXd d_lg = d_s.cwiseProduct(s).cwiseProduct(ones - s);
            Eigen::MatrixXd d_q = scale * (d_lg * k);
            grad.middleRows(r0, rows) += d_q * lp.wq.transpose();
        }
    }
    return grad;
}

LatentTensor denoise_background_core(const LatentTensor& z_fg, const Eigen::MatrixXd& h_tokens,
                                     const AttentionProjections& proj, std::uint64_t seed,
                                     const DenoiseOptions& opts) {
    LatentTensor z = gaussian_latent(z_fg.height, z_fg.width, z_fg.d_e(), LatentTensor::Role::Bg,
                                     derive_seed(seed, "zbg_init"));
    for (int step = 0; step < opts.steps; ++step) {
        Eigen::MatrixXd grad = background_objective_grad(z, z_fg, h_tokens, proj);
        z.values -= opts.lambda * grad;
        if (!z.values.allFinite()) {
            throw NonFiniteLatent("denoise_background: non-finite latent at step " +
                                  std::to_string(step));
        }
    }
    return z;
}

LatentTensor denoise_background(const LatentTensor& z_fg, const std::string& bg_prompt,
                                const AttentionProjections& proj, std::uint64_t seed,
                                const DenoiseOptions& opts) {
    if (trim(bg_prompt).empty()) {
        throw EmptyText("denoise_background: background prompt is empty");
    }
    TokenEmbeddings emb = encode_tokens(bg_prompt, derive_seed(seed, "bg_tokens"), z_fg.d_e());
    Eigen::Index n_content = 0;
    for (bool c : emb.content_mask) n_content += c ? 1 : 0;
    Eigen::MatrixXd h(n_content, z_fg.d_e());
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < emb.content_mask.size(); ++i) {
        if (emb.content_mask[i]) h.row(row++) = emb.vectors.row(static_cast<Eigen::Index>(i));
    }
    return denoise_background_core(z_fg, h, proj, seed, opts);
}

Image decode_latent(const LatentTensor& z, int upscale, std::uint64_t seed) {
    if (upscale < 1) throw ConfigError("decode_latent: upscale must be >= 1");
    Eigen::MatrixXd map = gaussian_matrix(z.d_e(), 3, derive_seed(seed, "decode_map")) *
                          (60.0 / std::sqrt(static_cast<double>(z.d_e())));
    Rng brng(derive_seed(seed, "decode_bias"));
    double bias[3];
    for (double& b : bias) b = 127.5 + 50.0 * brng.gaussian();

    Eigen::MatrixXd colors = z.values * map;  // P x 3
    Image img = make_image(z.width * upscale, z.height * upscale);
    for (int r = 0; r < z.height; ++r) {
        for (int c = 0; c < z.width; ++c) {
            Eigen::Index p = static_cast<Eigen::Index>(r) * z.width + c;
            std::uint8_t rgb[3];
            for (int ch = 0; ch < 3; ++ch) {
                double v = std::clamp(colors(p, ch) + bias[ch], 0.0, 255.0);
                rgb[ch] = static_cast<std::uint8_t>(std::lround(v));
            }
            for (int dy = 0; dy < upscale; ++dy) {
                for (int dx = 0; dx < upscale; ++dx) {
                    img.set(c * upscale + dx, r * upscale + dy, rgb[0], rgb[1], rgb[2]);
                }
            }
        }
    }
    return img;
}

}  // namespace taleforge
