// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/maskgen.hpp"

#include <algorithm>
#include <cmath>

#include "taleforge/errors.hpp"
#include "taleforge/linalg.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

TokenEmbeddings encode_tokens(const std::string& text, std::uint64_t seed, int d_e) {
    TokenEmbeddings emb;
    emb.tokens.push_back("<begin>");
    for (std::string& t : tokenize_ws(text)) emb.tokens.push_back(std::move(t));
    emb.tokens.push_back("<end>");
    const std::size_t n = emb.tokens.size();
    emb.vectors.resize(static_cast<Eigen::Index>(n), d_e);
    emb.content_mask.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = derive_seed(seed, emb.tokens[i]);
        emb.vectors.row(static_cast<Eigen::Index>(i)) = unit_vector(d_e, key).transpose();
        emb.content_mask[i] = i != 0 && i != n - 1;
    }
    return emb;
}

namespace {

constexpr int kFreqs = 8;

// sin/cos ladder at octave frequencies; appends 2*kFreqs values per scalar.
void sinusoid_features(double v, std::vector<double>* out) {
    for (int k = 0; k < kFreqs; ++k) {
        double w = std::ldexp(1.0, k) * v;  // 2^k * v
        out->push_back(std::sin(w));
        out->push_back(std::cos(w));
    }
}

}  // namespace

RegionQueries encode_region(const LayoutBox& box, LatentDims dims, std::uint64_t seed, int d_e) {
    RegionQueries q;
    for (int r = 0; r < dims.height; ++r) {
        double cy = (r + 0.5) / dims.height;
        if (!(box.y0 < cy && cy < box.y1)) continue;
        for (int c = 0; c < dims.width; ++c) {
            double cx = (c + 0.5) / dims.width;
            if (box.x0 < cx && cx < box.x1) q.pixel_coords.emplace_back(r, c);
        }
    }
    if (q.pixel_coords.empty()) {
        throw DegenerateBox("encode_region: box covers no latent pixel");
    }
    const int raw_dim = 6 * 2 * kFreqs;  // (row, col, x0, y0, x1, y1) ladders
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(q.pixel_coords.size()), raw_dim);
    std::vector<double> feat;
    feat.reserve(raw_dim);
    for (std::size_t i = 0; i < q.pixel_coords.size(); ++i) {
        feat.clear();
        sinusoid_features(static_cast<double>(q.pixel_coords[i].first) / dims.height, &feat);
        sinusoid_features(static_cast<double>(q.pixel_coords[i].second) / dims.width, &feat);
        sinusoid_features(box.x0, &feat);
        sinusoid_features(box.y0, &feat);
        sinusoid_features(box.x1, &feat);
        sinusoid_features(box.y1, &feat);
        for (int d = 0; d < raw_dim; ++d) raw(static_cast<Eigen::Index>(i), d) = feat[d];
    }
    Eigen::MatrixXd proj =
        gaussian_matrix(raw_dim, d_e, derive_seed(seed, "region_proj")) / std::sqrt(raw_dim);
    q.grid = raw * proj;
    return q;
}

AttentionResult bounded_attention(const RegionQueries& queries, const TokenEmbeddings& keys) {
    if (queries.grid.cols() != keys.vectors.cols()) {
        throw ShapeMismatch("bounded_attention: query dim " + std::to_string(queries.grid.cols()) +
                            " vs key dim " + std::to_string(keys.vectors.cols()));
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(queries.grid.cols()));
    AttentionResult res;
    res.probs = row_softmax(queries.grid * keys.vectors.transpose() * scale);
    res.output = res.probs * keys.vectors;
    return res;
}

Eigen::MatrixXd aggregate_attention(const std::vector<Eigen::MatrixXd>& per_call_probs,
                                    const std::vector<bool>& content_mask,
                                    const std::vector<std::pair<int, int>>& pixel_coords,
                                    LatentDims dims) {
    if (per_call_probs.empty()) throw ShapeMismatch("aggregate_attention: no calls");
    const Eigen::Index n_px = static_cast<Eigen::Index>(pixel_coords.size());
    const Eigen::Index n_tok = static_cast<Eigen::Index>(content_mask.size());
    for (const auto& p : per_call_probs) {
        if (p.rows() != n_px || p.cols() != n_tok) {
            throw ShapeMismatch("aggregate_attention: call shape mismatch");
        }
    }
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_px);
    for (const auto& probs : per_call_probs) {
        for (Eigen::Index t = 0; t < n_tok; ++t) {
            if (content_mask[static_cast<std::size_t>(t)]) acc += probs.col(t);
        }
    }
    acc /= static_cast<double>(per_call_probs.size());
    Eigen::MatrixXd a_bar = Eigen::MatrixXd::Zero(dims.height, dims.width);
    for (Eigen::Index i = 0; i < n_px; ++i) {
        a_bar(pixel_coords[static_cast<std::size_t>(i)].first,
              pixel_coords[static_cast<std::size_t>(i)].second) = acc(i);
    }
    return a_bar;
}

std::pair<BoolGrid, BoolGrid> cluster_fg_bg(const Eigen::MatrixXd& a_bar,
                                            const std::vector<std::pair<int, int>>& pixel_coords) {
    const std::size_t n = pixel_coords.size();
    BoolGrid fg = BoolGrid::Constant(a_bar.rows(), a_bar.cols(), false);
    BoolGrid bg = BoolGrid::Constant(a_bar.rows(), a_bar.cols(), true);
    if (n == 0) return {fg, bg};

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = a_bar(pixel_coords[i].first, pixel_coords[i].second);
    }
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());

    std::vector<int> assign(n, 0);
    if (lo == hi) {
        // constant map: top 0.8-quantile by count, first pixels row-major
        std::size_t k = std::max<std::size_t>(
            1, n - static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(n))));
        for (std::size_t i = 0; i < k; ++i) assign[i] = 1;
    } else {
        double c0 = lo, c1 = hi;
        for (int iter = 0; iter < 50; ++iter) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                double d0 = std::abs(values[i] - c0);
                double d1 = std::abs(values[i] - c1);
                int a = d1 < d0 ? 1 : 0;  // tie goes to the lower cluster
                if (a != assign[i]) {
                    assign[i] = a;
                    changed = true;
                }
            }
            double s0 = 0, s1 = 0;
            std::size_t n0 = 0, n1 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i]) {
                    s1 += values[i];
                    ++n1;
                } else {
                    s0 += values[i];
                    ++n0;
                }
            }
            if (n0) c0 = s0 / static_cast<double>(n0);
            if (n1) c1 = s1 / static_cast<double>(n1);
            if (!changed) break;
        }
        // cluster with the higher mean is foreground; assign==1 tracks c1
        // which stays the higher center under min/max init, but recheck
        double m0 = 0, m1 = 0;
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i]) {
                m1 += values[i];
                ++n1;
            } else {
                m0 += values[i];
                ++n0;
            }
        }
        bool one_is_fg = n1 == 0 ? false : (n0 == 0 ? true : m1 / n1 >= m0 / n0);
        if (!one_is_fg) {
            for (auto& a : assign) a = 1 - a;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool is_fg = assign[i] == 1;
        fg(pixel_coords[i].first, pixel_coords[i].second) = is_fg;
        bg(pixel_coords[i].first, pixel_coords[i].second) = !is_fg;
    }
    return {fg, bg};
}

Eigen::MatrixXd init_mask(const Eigen::MatrixXd& a_bar, double xi, double phi) {
    Eigen::ArrayXXd inner = a_bar.array() - phi;
    double l1 = inner.abs().sum();
    Eigen::ArrayXXd normed =
        l1 == 0.0 ? Eigen::ArrayXXd::Zero(a_bar.rows(), a_bar.cols()) : (inner / l1).eval();
    Eigen::ArrayXXd sig = 1.0 / (1.0 + (-xi * normed).exp());
    return (sig / sig.sum()).matrix();
}

Eigen::MatrixXd refine_mask(const Eigen::MatrixXd& m_init, const BoolGrid& p_fg,
                            std::string* warning) {
    if (m_init.rows() != p_fg.rows() || m_init.cols() != p_fg.cols()) {
        throw ShapeMismatch("refine_mask: shape mismatch");
    }
    double fg_count = static_cast<double>(p_fg.count());
    if (fg_count == 0.0) {
        if (warning) *warning = "EmptyForeground: refine_mask got an empty foreground";
        return Eigen::MatrixXd::Zero(m_init.rows(), m_init.cols());
    }
    double denom = std::min(m_init.sum(), fg_count);
    Eigen::MatrixXd masked = p_fg.select(m_init, Eigen::MatrixXd::Zero(m_init.rows(), m_init.cols()));
    return masked / denom;
}

MaskSet compose_masks(std::vector<SaliencyMask> per_character) {
    if (per_character.empty()) throw AllMasksEmpty("compose_masks: no masks");
    const Eigen::Index h = per_character.front().m_refined.rows();
    const Eigen::Index w = per_character.front().m_refined.cols();
    for (const auto& m : per_character) {
        if (m.m_refined.rows() != h || m.m_refined.cols() != w) {
            throw ShapeMismatch("compose_masks: latent dims differ");
        }
    }
    BoolGrid union_support = BoolGrid::Constant(h, w, false);
    std::vector<double> areas(per_character.size(), 0.0);
    for (std::size_t j = 0; j < per_character.size(); ++j) {
        BoolGrid support = per_character[j].m_refined.array() > 0.0;
        areas[j] = static_cast<double>(support.count());
        union_support = union_support || support;
    }
    double union_area = static_cast<double>(union_support.count());
    if (union_area == 0.0) {
        throw AllMasksEmpty("compose_masks: every refined mask is empty");
    }
    MaskSet set;
    set.composite = Eigen::MatrixXd::Zero(h, w);
    for (std::size_t j = 0; j < per_character.size(); ++j) {
        per_character[j].eta = areas[j] / union_area;
        set.composite =
            set.composite.cwiseMax(per_character[j].eta * per_character[j].m_refined);
    }
    set.per_character = std::move(per_character);
    return set;
}

MaskSet generate_masks(const FrameLayout& layout, LatentDims dims, std::uint64_t seed,
                       const MaskGenOptions& opts) {
    if (layout.boxes.empty()) throw AllMasksEmpty("generate_masks: layout has no boxes");
    std::uint64_t token_seed = derive_seed(seed, "token_encoder");
    std::uint64_t region_seed = derive_seed(seed, "region_encoder");

    std::vector<SaliencyMask> masks;
    masks.reserve(layout.boxes.size());
    for (std::size_t j = 0; j < layout.boxes.size(); ++j) {
        std::uint64_t box_seed = derive_seed(seed, {static_cast<std::uint64_t>(j)});
        TokenEmbeddings tokens = encode_tokens(layout.fg_prompts[j], token_seed, opts.d_e);
        RegionQueries queries = encode_region(layout.boxes[j], dims, region_seed, opts.d_e);

        std::vector<Eigen::MatrixXd> calls;
        calls.reserve(static_cast<std::size_t>(opts.n_heads) * opts.n_layers * opts.n_timesteps);
        for (int h = 0; h < opts.n_heads; ++h) {
            for (int l = 0; l < opts.n_layers; ++l) {
                for (int t = 0; t < opts.n_timesteps; ++t) {
                    std::uint64_t call_seed =
                        derive_seed(box_seed, {static_cast<std::uint64_t>(h),
                                               static_cast<std::uint64_t>(l),
                                               static_cast<std::uint64_t>(t)});
                    RegionQueries jittered = queries;
                    jittered.grid +=
                        0.1 * gaussian_matrix(queries.grid.rows(), queries.grid.cols(), call_seed);
                    calls.push_back(bounded_attention(jittered, tokens).probs);
                }
            }
        }
        SaliencyMask m;
        m.a_bar = aggregate_attention(calls, tokens.content_mask, queries.pixel_coords, dims);
        auto [fg, bg] = cluster_fg_bg(m.a_bar, queries.pixel_coords);
        m.p_fg = fg;
        m.m_init = init_mask(m.a_bar, opts.xi, opts.phi);
        std::string warning;
        m.m_refined = refine_mask(m.m_init, m.p_fg, &warning);
        if (!warning.empty()) m.warnings.push_back(warning);
        masks.push_back(std::move(m));
    }
    return compose_masks(std::move(masks));
}

}  // namespace taleforge
