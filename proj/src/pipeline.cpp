// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "taleforge/errors.hpp"
#include "taleforge/layout.hpp"
#include "taleforge/maskgen.hpp"
#include "taleforge/raster.hpp"
#include "taleforge/rng.hpp"
#include "taleforge/sha256.hpp"

namespace taleforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int get_int(const json& j, const char* key, int def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return j[key].get<int>();
}

double get_num(const json& j, const char* key, double def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

std::string get_str(const json& j, const char* key, const std::string& def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
    return j[key].get<std::string>();
}

bool get_bool(const json& j, const char* key, bool def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
    return j[key].get<bool>();
}

void check_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& item : j.items()) {
        if (known.find(item.key()) == known.end()) {
            throw ConfigError("unknown config key " + where + item.key());
        }
    }
}

std::string resolve_path(const std::string& p, const fs::path& base) {
    if (p.empty()) return p;
    fs::path fp(p);
    if (fp.is_absolute()) return fp.lexically_normal().string();
    return (base / fp).lexically_normal().string();
}

void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    check_keys(j, {"seed",          "frames",        "latent",          "steps",
                   "xi",            "phi",           "lambda",          "delta_omega",
                   "lora",          "guidance_scale", "lr",             "k_candidates",
                   "max_layout_iters", "n_char_tokens", "mask",         "attn_layers",
                   "image_upscale", "image_format",  "strict_layout",   "min_area_mode",
                   "min_area_fraction", "bubbles",   "suppression_scale", "record_timings",
                   "out_dir",       "workers",       "backend",         "demos_file",
                   "heatmaps_dir"},
               "");

    PipelineConfig c;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            throw ConfigError("seed must be an integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.frames = get_int(j, "frames", c.frames);
    if (j.contains("latent")) {
        const json& l = j["latent"];
        check_keys(l, {"height", "width", "d_e"}, "latent.");
        c.latent_height = get_int(l, "height", c.latent_height);
        c.latent_width = get_int(l, "width", c.latent_width);
        c.d_e = get_int(l, "d_e", c.d_e);
    }
    c.steps = get_int(j, "steps", c.steps);
    c.xi = get_num(j, "xi", c.xi);
    c.phi = get_num(j, "phi", c.phi);
    c.lambda = get_num(j, "lambda", c.lambda);
    c.delta_omega = get_num(j, "delta_omega", c.delta_omega);
    if (j.contains("lora")) {
        const json& l = j["lora"];
        check_keys(l, {"rank", "alpha"}, "lora.");
        c.lora_rank = get_int(l, "rank", c.lora_rank);
        c.lora_alpha = get_num(l, "alpha", c.lora_alpha);
    }
    c.guidance_scale = get_num(j, "guidance_scale", c.guidance_scale);
    c.lr = get_num(j, "lr", c.lr);
    c.k_candidates = get_int(j, "k_candidates", c.k_candidates);
    c.max_layout_iters = get_int(j, "max_layout_iters", c.max_layout_iters);
    c.n_char_tokens = get_int(j, "n_char_tokens", c.n_char_tokens);
    if (j.contains("mask")) {
        const json& m = j["mask"];
        check_keys(m, {"heads", "layers", "timesteps"}, "mask.");
        c.mask_heads = get_int(m, "heads", c.mask_heads);
        c.mask_layers = get_int(m, "layers", c.mask_layers);
        c.mask_timesteps = get_int(m, "timesteps", c.mask_timesteps);
    }
    c.attn_layers = get_int(j, "attn_layers", c.attn_layers);
    c.image_upscale = get_int(j, "image_upscale", c.image_upscale);
    c.image_format = get_str(j, "image_format", c.image_format);
    c.strict_layout = get_bool(j, "strict_layout", c.strict_layout);
    c.min_area_mode = get_str(j, "min_area_mode", c.min_area_mode);
    if (j.contains("min_area_fraction")) {
        c.min_area_fraction = get_num(j, "min_area_fraction", 0.25);
    }
    if (j.contains("bubbles")) {
        const json& b = j["bubbles"];
        check_keys(b, {"font_size_init", "padding", "max_words_per_line", "h_min", "epsilon"},
                   "bubbles.");
        c.bubbles.font_size_init = get_int(b, "font_size_init", c.bubbles.font_size_init);
        c.bubbles.padding = get_int(b, "padding", c.bubbles.padding);
        c.bubbles.max_words_per_line =
            get_int(b, "max_words_per_line", c.bubbles.max_words_per_line);
        c.bubbles.h_min = get_int(b, "h_min", c.bubbles.h_min);
        c.bubbles.epsilon = get_int(b, "epsilon", c.bubbles.epsilon);
    }
    c.suppression_scale = get_num(j, "suppression_scale", c.suppression_scale);
    c.record_timings = get_bool(j, "record_timings", c.record_timings);
    c.out_dir = get_str(j, "out_dir", c.out_dir);
    c.workers = get_int(j, "workers", c.workers);
    if (j.contains("backend")) {
        const json& b = j["backend"];
        check_keys(b, {"kind", "fixture", "endpoint", "path", "model", "api_key",
                       "timeout_seconds"},
                   "backend.");
        c.backend.kind = get_str(b, "kind", c.backend.kind);
        c.backend.fixture = get_str(b, "fixture", c.backend.fixture);
        c.backend.wire.endpoint = get_str(b, "endpoint", c.backend.wire.endpoint);
        c.backend.wire.path = get_str(b, "path", c.backend.wire.path);
        c.backend.wire.model = get_str(b, "model", c.backend.wire.model);
        c.backend.wire.api_key = get_str(b, "api_key", c.backend.wire.api_key);
        c.backend.wire.timeout_seconds = get_int(b, "timeout_seconds", c.backend.wire.timeout_seconds);
    }
    c.demos_file = get_str(j, "demos_file", c.demos_file);
    c.heatmaps_dir = get_str(j, "heatmaps_dir", c.heatmaps_dir);

    require(c.frames >= 0, "frames must be >= 0");
    require(c.latent_height >= 4 && c.latent_width >= 4, "latent dims must be >= 4");
    require(c.d_e >= 4, "d_e must be >= 4");
    require(c.steps >= 4, "steps must be >= 4");
    require(c.xi > 0.0, "xi must be > 0");
    require(c.phi >= 0.0 && c.phi < 1.0, "phi must be in [0, 1)");
    require(c.lambda >= 0.0, "lambda must be >= 0");
    require(c.delta_omega >= 0.0 && c.delta_omega <= 1.0, "delta_omega must be in [0, 1]");
    require(c.lora_rank >= 1, "lora.rank must be >= 1");
    require(c.lora_alpha > 0.0, "lora.alpha must be > 0");
    require(c.guidance_scale > 0.0, "guidance_scale must be > 0");
    require(c.lr > 0.0, "lr must be > 0");
    require(c.k_candidates >= 1, "k_candidates must be >= 1");
    require(c.max_layout_iters >= 1, "max_layout_iters must be >= 1");
    require(c.n_char_tokens >= 1, "n_char_tokens must be >= 1");
    require(c.mask_heads >= 1 && c.mask_layers >= 1 && c.mask_timesteps >= 1,
            "mask call grid must be >= 1 on every axis");
    require(c.attn_layers >= 1, "attn_layers must be >= 1");
    require(c.image_upscale >= 1, "image_upscale must be >= 1");
    require(c.image_format == "ppm" || c.image_format == "png",
            "image_format must be ppm or png");
    require(c.min_area_mode == "scaled" || c.min_area_mode == "literal" ||
                c.min_area_mode == "off",
            "min_area_mode must be scaled, literal, or off");
    if (c.min_area_fraction) {
        require(*c.min_area_fraction > 0.0 && *c.min_area_fraction <= 1.0,
                "min_area_fraction must be in (0, 1]");
    }
    require(c.bubbles.font_size_init >= 6, "bubbles.font_size_init must be >= 6");
    require(c.bubbles.padding >= 0, "bubbles.padding must be >= 0");
    require(c.bubbles.max_words_per_line >= 1, "bubbles.max_words_per_line must be >= 1");
    require(c.bubbles.epsilon >= 0, "bubbles.epsilon must be >= 0");
    require(c.suppression_scale > 0.0, "suppression_scale must be > 0");
    require(c.workers >= 1, "workers must be >= 1");
    require(c.backend.kind == "mock" || c.backend.kind == "wire",
            "backend.kind must be mock or wire");

    fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    c.demos_file = resolve_path(c.demos_file, base);
    c.heatmaps_dir = resolve_path(c.heatmaps_dir, base);
    c.backend.fixture = resolve_path(c.backend.fixture, base);
    return c;
}

std::string canonical_config_json(const PipelineConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["frames"] = c.frames;
    j["latent"] = {{"height", c.latent_height}, {"width", c.latent_width}, {"d_e", c.d_e}};
    j["steps"] = c.steps;
    j["xi"] = c.xi;
    j["phi"] = c.phi;
    j["lambda"] = c.lambda;
    j["delta_omega"] = c.delta_omega;
    j["lora"] = {{"rank", c.lora_rank}, {"alpha", c.lora_alpha}};
    j["guidance_scale"] = c.guidance_scale;
    j["lr"] = c.lr;
    j["k_candidates"] = c.k_candidates;
    j["max_layout_iters"] = c.max_layout_iters;
    j["n_char_tokens"] = c.n_char_tokens;
    j["mask"] = {{"heads", c.mask_heads},
                 {"layers", c.mask_layers},
                 {"timesteps", c.mask_timesteps}};
    j["attn_layers"] = c.attn_layers;
    j["image_upscale"] = c.image_upscale;
    j["image_format"] = c.image_format;
    j["strict_layout"] = c.strict_layout;
    j["min_area_mode"] = c.min_area_mode;
    if (c.min_area_fraction) j["min_area_fraction"] = *c.min_area_fraction;
    j["bubbles"] = {{"font_size_init", c.bubbles.font_size_init},
                    {"padding", c.bubbles.padding},
                    {"max_words_per_line", c.bubbles.max_words_per_line},
                    {"h_min", c.bubbles.h_min},
                    {"epsilon", c.bubbles.epsilon}};
    j["suppression_scale"] = c.suppression_scale;
    j["record_timings"] = c.record_timings;
    j["backend"] = {{"kind", c.backend.kind},
                    {"fixture", c.backend.fixture},
                    {"endpoint", c.backend.wire.endpoint},
                    {"path", c.backend.wire.path},
                    {"model", c.backend.wire.model},
                    {"timeout_seconds", c.backend.wire.timeout_seconds}};
    j["demos_file"] = c.demos_file;
    j["heatmaps_dir"] = c.heatmaps_dir;
    return j.dump();
}

std::string config_hash(const PipelineConfig& c) { return sha256_hex(canonical_config_json(c)); }

std::unique_ptr<LlmBackend> make_backend(const BackendConfig& config) {
    if (config.kind == "mock") {
        if (config.fixture.empty()) throw ConfigError("mock backend needs backend.fixture");
        return std::make_unique<MockBackend>(config.fixture);
    }
    if (config.kind == "wire") return std::make_unique<WireBackend>(config.wire);
    throw ConfigError("unknown backend kind: " + config.kind);
}

std::string story_to_json(const StoryBundle& story) {
    json sj;
    sj["story"] = story.story_text;
    sj["characters"] = json::array();
    for (const CharacterSpec& c : story.characters) {
        sj["characters"].push_back({{"id", c.id},
                                    {"name", c.name},
                                    {"physical_description", c.physical_description},
                                    {"personality", c.personality}});
    }
    sj["frames"] = json::array();
    for (std::size_t i = 0; i < story.frame_descriptions.size(); ++i) {
        json fj;
        fj["description"] = story.frame_descriptions[i];
        fj["dialogues"] = json::array();
        if (i < story.dialogues.size()) {
            for (const Dialogue& d : story.dialogues[i]) {
                fj["dialogues"].push_back(
                    {{"character_id", d.character_id}, {"utterance", d.utterance}});
            }
        }
        sj["frames"].push_back(fj);
    }
    return sj.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + p.string());
}

CharacterBank subset_bank(const CharacterBank& bank, const FrameLayout& layout) {
    CharacterBank sub;
    sub.n_char_tokens = bank.n_char_tokens;
    sub.d_e = bank.d_e;
    for (const LayoutBox& box : layout.boxes) {
        std::size_t idx = bank.character_ids.size();
        for (std::size_t i = 0; i < bank.character_ids.size(); ++i) {
            if (bank.character_ids[i] == box.character_id) {
                idx = i;
                break;
            }
        }
        if (idx == bank.character_ids.size()) {
            throw ConfigError("layout names unknown character: " + box.character_id);
        }
        sub.character_ids.push_back(bank.character_ids[idx]);
        sub.features.push_back(bank.features[idx]);
        sub.token_perm.push_back(bank.token_perm[idx]);
    }
    return sub;
}

}  // namespace

Heatmap mask_to_heatmap(const Eigen::MatrixXd& m) {
    Heatmap hm = make_heatmap(static_cast<int>(m.rows()), static_cast<int>(m.cols()), 1);
    for (int r = 0; r < hm.height; ++r) {
        for (int c = 0; c < hm.width; ++c) hm.at(r, c, 0) = static_cast<float>(m(r, c));
    }
    return hm;
}

Image blend_panel(const Image& bg, const Image& fg, const Eigen::MatrixXd& composite) {
    double peak = composite.maxCoeff();
    Heatmap a = make_heatmap(static_cast<int>(composite.rows()),
                             static_cast<int>(composite.cols()), 1);
    if (peak > 0.0) {
        for (int r = 0; r < a.height; ++r) {
            for (int c = 0; c < a.width; ++c) {
                a.at(r, c, 0) = static_cast<float>(composite(r, c) / peak);
            }
        }
    }
    Heatmap alpha = resample_bilinear(a, bg.width, bg.height);
    Image out = bg;
    for (int y = 0; y < bg.height; ++y) {
        for (int x = 0; x < bg.width; ++x) {
            double al = std::clamp(static_cast<double>(alpha.at(y, x, 0)), 0.0, 1.0);
            const std::uint8_t* pb = bg.px(x, y);
            const std::uint8_t* pf = fg.px(x, y);
            std::uint8_t rgb[3];
            for (int ch = 0; ch < 3; ++ch) {
                double v = (1.0 - al) * pb[ch] + al * pf[ch];
                rgb[ch] = static_cast<std::uint8_t>(std::floor(v + 0.5));
            }
            out.set(x, y, rgb[0], rgb[1], rgb[2]);
        }
    }
    return out;
}

namespace {

std::vector<Heatmap> head_maps(const PipelineConfig& cfg, const MaskSet& masks, int frame_index,
                               int box_index) {
    if (!cfg.heatmaps_dir.empty()) {
        fs::path p = fs::path(cfg.heatmaps_dir) /
                     ("frame_" + std::to_string(frame_index) + "_char_" +
                      std::to_string(box_index) + ".clipseg.hmap");
        if (fs::exists(p)) {
            Heatmap m = load_hmap(p);
            if (m.channels == 2) {
                Heatmap a = make_heatmap(m.height, m.width, 1);
                Heatmap b = make_heatmap(m.height, m.width, 1);
                for (int r = 0; r < m.height; ++r) {
                    for (int c = 0; c < m.width; ++c) {
                        a.at(r, c, 0) = m.at(r, c, 0);
                        b.at(r, c, 0) = m.at(r, c, 1);
                    }
                }
                return {a, b};
            }
            if (m.channels == 1) return {m, m};
            throw DimMismatch("head map " + p.string() + " must have 1 or 2 channels");
        }
    }
    Heatmap hm =
        mask_to_heatmap(masks.per_character[static_cast<std::size_t>(box_index - 1)].m_refined);
    return {hm, hm};
}

PanelArtifact render_frame(const PipelineConfig& cfg, const StoryBundle& story,
                           const CharacterBank& bank, const AttentionProjections& proj,
                           const GlyphProvider& font, LlmBackend& backend, int k) {
    PanelArtifact art;
    art.frame_index = k;
    auto t0 = std::chrono::steady_clock::now();
    try {
        const std::uint64_t frame_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(k)});
        const std::string& desc = story.frame_descriptions[static_cast<std::size_t>(k - 1)];

        LayoutOptions lo;
        lo.strict = cfg.strict_layout;
        lo.min_area_mode = parse_min_area_mode(cfg.min_area_mode);
        lo.min_area_fraction = cfg.min_area_fraction;
        auto [layout, trace] =
            correct_layout_iteratively(desc, story.characters, backend, cfg.max_layout_iters,
                                       derive_seed(frame_seed, "layout"), lo);
        for (const ReconstructionError& e : trace) art.layout_e_rec.push_back(e.e_rec);
        for (const std::string& w : layout.warnings) art.warnings.push_back("layout: " + w);

        LatentDims dims{cfg.latent_height, cfg.latent_width};
        MaskGenOptions mo;
        mo.n_heads = cfg.mask_heads;
        mo.n_layers = cfg.mask_layers;
        mo.n_timesteps = cfg.mask_timesteps;
        mo.d_e = cfg.d_e;
        mo.xi = cfg.xi;
        mo.phi = cfg.phi;
        MaskSet masks = generate_masks(layout, dims, derive_seed(frame_seed, "mask"), mo);
        for (std::size_t jx = 0; jx < masks.per_character.size(); ++jx) {
            for (const std::string& w : masks.per_character[jx].warnings) {
                art.warnings.push_back("mask[" + std::to_string(jx + 1) + "]: " + w);
            }
        }

        CharacterBank sub = subset_bank(bank, layout);
        OptimizeOptions oo;
        oo.steps = cfg.steps;
        oo.delta_omega = cfg.delta_omega;
        oo.lr = cfg.lr;
        oo.guidance_scale = cfg.guidance_scale;
        oo.rank = cfg.lora_rank;
        oo.alpha = cfg.lora_alpha;
        OptimizeResult fg =
            optimize_fg_latent(masks, sub, proj, derive_seed(frame_seed, "fg"), oo);

        DenoiseOptions dn;
        dn.lambda = cfg.lambda;
        dn.steps = cfg.steps;
        LatentTensor z_bg =
            denoise_background(fg.z_fg, layout.bg_prompt, proj, derive_seed(frame_seed, "bg"), dn);

        Image img_fg =
            decode_latent(fg.z_fg, cfg.image_upscale, derive_seed(frame_seed, "decode_fg"));
        Image img_bg =
            decode_latent(z_bg, cfg.image_upscale, derive_seed(frame_seed, "decode_bg"));
        Image panel = blend_panel(img_bg, img_fg, masks.composite);

        const int img_w = panel.width, img_h = panel.height;
        GetLocationOptions glo;
        glo.suppression_scale = cfg.suppression_scale;
        std::vector<BubblePlacement> placed;
        std::vector<std::pair<int, int>> used;
        for (const Dialogue& dlg : story.dialogues[static_cast<std::size_t>(k - 1)]) {
            int box_index = 0;
            for (std::size_t b = 0; b < layout.boxes.size(); ++b) {
                if (layout.boxes[b].character_id == dlg.character_id) {
                    box_index = static_cast<int>(b) + 1;
                    break;
                }
            }
            if (box_index == 0) {
                art.warnings.push_back("bubble: no box for speaker " + dlg.character_id);
                continue;
            }
            const CharacterSpec* spec = nullptr;
            for (const CharacterSpec& s : story.characters) {
                if (s.id == dlg.character_id) {
                    spec = &s;
                    break;
                }
            }
            if (spec == nullptr) {
                art.warnings.push_back("bubble: unknown speaker " + dlg.character_id);
                continue;
            }
            std::vector<Heatmap> maps = head_maps(cfg, masks, k, box_index);
            HeadLocation head = get_location(img_w, img_h, maps, used, glo);
            used.emplace_back(head.x, head.y);
            placed.push_back(place_bubble(*spec, head, dlg.utterance, img_w, img_h, cfg.bubbles));
        }
        ResolveResult rr = resolve_conflicts(std::move(placed), img_w, img_h);
        std::vector<std::string> glyph_warnings = draw_bubbles(&panel, rr.bubbles, font);
        for (const std::string& w : glyph_warnings) art.warnings.push_back("draw: " + w);
        if (rr.unresolved) art.warnings.push_back("bubble: conflicts unresolved after 3 passes");

        // stage every artifact, then write (a failed frame leaves no files)
        const std::string stem = "frame_" + std::to_string(k);
        const bool png = cfg.image_format == "png";
        art.image_file = stem + (png ? ".png" : ".ppm");
        art.layout_file = stem + ".layout.txt";
        art.maskset_file = stem + ".maskset.json";
        art.z_fg_file = stem + ".zfg.hmap";
        art.z_bg_file = stem + ".zbg.hmap";
        art.bubbles_file = stem + ".bubbles.json";

        std::string image_bytes = png ? png_to_bytes(panel) : ppm_to_bytes(panel);
        std::string layout_text = serialize_layout(layout);

        BoolGrid union_support =
            BoolGrid::Constant(masks.composite.rows(), masks.composite.cols(), false);
        for (const SaliencyMask& m : masks.per_character) {
            union_support = union_support || (m.m_refined.array() > 0.0);
        }
        json mask_j;
        mask_j["union_support"] = static_cast<std::int64_t>(union_support.count());
        mask_j["characters"] = json::array();
        std::vector<std::string> mask_bytes;
        for (std::size_t b = 0; b < masks.per_character.size(); ++b) {
            const SaliencyMask& m = masks.per_character[b];
            std::string mask_name = stem + "_char_" + std::to_string(b + 1) + ".mask.hmap";
            art.mask_files.push_back(mask_name);
            mask_bytes.push_back(hmap_to_bytes(mask_to_heatmap(m.m_refined)));
            json cj;
            cj["id"] = layout.boxes[b].character_id;
            cj["box_index"] = static_cast<int>(b) + 1;
            cj["eta"] = m.eta;
            cj["support"] = static_cast<std::int64_t>((m.m_refined.array() > 0.0).count());
            cj["mask_file"] = mask_name;
            cj["warnings"] = m.warnings;
            mask_j["characters"].push_back(cj);
        }

        json bub_j;
        bub_j["unresolved"] = rr.unresolved;
        bub_j["passes"] = rr.passes;
        bub_j["warnings"] = glyph_warnings;
        bub_j["bubbles"] = json::array();
        for (const BubblePlacement& b : rr.bubbles) {
            json bj;
            bj["character_id"] = b.character_id;
            bj["text"] = b.text;
            bj["wrapped_text"] = b.wrapped_text;
            bj["x_b"] = b.x_b;
            bj["y_b"] = b.y_b;
            bj["w_bubble"] = b.w_bubble;
            bj["h_bubble"] = b.h_bubble;
            bj["edge_point"] = {b.edge_x, b.edge_y};
            bj["head"] = {b.head_x, b.head_y};
            bj["font_size"] = b.font_size;
            bj["unclamped"] = {b.unclamped_x_b, b.unclamped_y_b};
            bub_j["bubbles"].push_back(bj);
        }

        fs::path out(cfg.out_dir);
        write_file(out / art.image_file, image_bytes);
        write_file(out / art.layout_file, layout_text);
        write_file(out / art.maskset_file, mask_j.dump(2) + "\n");
        for (std::size_t b = 0; b < mask_bytes.size(); ++b) {
            write_file(out / art.mask_files[b], mask_bytes[b]);
        }
        write_file(out / art.z_fg_file, hmap_to_bytes(latent_to_hmap(fg.z_fg)));
        write_file(out / art.z_bg_file, hmap_to_bytes(latent_to_hmap(z_bg)));
        write_file(out / art.bubbles_file, bub_j.dump(2) + "\n");
    } catch (const std::exception& e) {
        art.error = e.what();
        art.image_file.clear();
        art.layout_file.clear();
        art.maskset_file.clear();
        art.z_fg_file.clear();
        art.z_bg_file.clear();
        art.bubbles_file.clear();
        art.mask_files.clear();
    }
    if (cfg.record_timings) {
        art.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    }
    return art;
}

json manifest_frame_entry(const PanelArtifact& a, bool timings) {
    json f;
    f["index"] = a.frame_index;
    f["status"] = a.error.empty() ? "ok" : "error";
    if (!a.error.empty()) f["error"] = a.error;
    if (a.error.empty()) {
        f["files"] = {{"image", a.image_file},       {"layout", a.layout_file},
                      {"maskset", a.maskset_file},   {"z_fg", a.z_fg_file},
                      {"z_bg", a.z_bg_file},         {"bubbles", a.bubbles_file},
                      {"masks", a.mask_files}};
    }
    f["layout_e_rec"] = a.layout_e_rec;
    f["warnings"] = a.warnings;
    if (timings) f["elapsed_ms"] = a.elapsed_ms;
    return f;
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config, const StoryBundle& story_in,
                       LlmBackend& backend) {
    RunResult result;
    fs::path out(config.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        result.run_error = "cannot create output directory: " + out.string();
        result.any_failed = true;
        return result;
    }

    StoryBundle story = story_in;
    if (config.frames > 0) story.frame_count = config.frames;

    json manifest;
    manifest["config_hash"] = config_hash(config);
    manifest["seed"] = config.seed;

    StoryBundle expanded;
    try {
        if (config.demos_file.empty()) {
            throw ConfigError("demos_file is required to expand the story");
        }
        DemonstrationSet demos = load_demonstrations(config.demos_file);
        expanded = expand_story(story, demos, backend, config.k_candidates,
                                derive_seed(config.seed, "expand"));
    } catch (const std::exception& e) {
        result.run_error = e.what();
        result.any_failed = true;
        manifest["error"] = result.run_error;
        manifest["frames"] = json::array();
        result.manifest_file = "run_manifest.json";
        write_file(out / result.manifest_file, manifest.dump(2) + "\n");
        return result;
    }

    result.story_file = "expanded_story.json";
    write_file(out / result.story_file, story_to_json(expanded));

    CharacterBank bank = build_character_db(expanded.characters, config.n_char_tokens, config.d_e,
                                            derive_seed(config.seed, "bank"));
    AttentionProjections proj =
        make_projections(config.attn_layers, config.d_e, derive_seed(config.seed, "proj"));
    GlyphProvider font;

    const int n = expanded.frame_count;
    result.frames.resize(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            int idx = next.fetch_add(1);
            if (idx >= n) break;
            result.frames[static_cast<std::size_t>(idx)] =
                render_frame(config, expanded, bank, proj, font, backend, idx + 1);
        }
    };
    int workers = std::min(config.workers, n);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    manifest["story"] = result.story_file;
    manifest["frames"] = json::array();
    for (const PanelArtifact& a : result.frames) {
        manifest["frames"].push_back(manifest_frame_entry(a, config.record_timings));
        if (!a.error.empty()) result.any_failed = true;
    }
    result.manifest_file = "run_manifest.json";
    write_file(out / result.manifest_file, manifest.dump(2) + "\n");
    return result;
}

RunResult run_pipeline(const PipelineConfig& config, const fs::path& story_path) {
    StoryBundle story = load_story(story_path);
    std::unique_ptr<LlmBackend> backend = make_backend(config.backend);
    return run_pipeline(config, story, *backend);
}

}  // namespace taleforge
