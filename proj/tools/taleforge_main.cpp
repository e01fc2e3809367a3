// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "taleforge/bubbles.hpp"
#include "taleforge/errors.hpp"
#include "taleforge/glyphs.hpp"
#include "taleforge/hmap.hpp"
#include "taleforge/image.hpp"
#include "taleforge/latent.hpp"
#include "taleforge/layout.hpp"
#include "taleforge/maskgen.hpp"
#include "taleforge/narrative.hpp"
#include "taleforge/pipeline.hpp"
#include "taleforge/rng.hpp"
#include "taleforge/strutil.hpp"

namespace fs = std::filesystem;
using namespace taleforge;
using nlohmann::json;

namespace {

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 1;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* sub, Common* c) {
    sub->add_option("--config", c->config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    c->seed_opt = sub->add_option("--seed", c->seed, "master seed (overrides config)");
    c->out_opt = sub->add_option("--out", c->out, "output directory (overrides config)");
    c->workers_opt = sub->add_option("--workers", c->workers, "frame worker count")
                         ->check(CLI::PositiveNumber);
}

PipelineConfig effective_config(const Common& c) {
    PipelineConfig cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    if (c.seed_opt->count() > 0) cfg.seed = c.seed;
    if (c.out_opt->count() > 0) cfg.out_dir = c.out;
    if (c.workers_opt->count() > 0) cfg.workers = c.workers;
    return cfg;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open: " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + p.string());
}

fs::path ensure_out(const PipelineConfig& cfg) {
    fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory: " + out.string());
    return out;
}

LayoutOptions layout_options(const PipelineConfig& cfg) {
    LayoutOptions lo;
    lo.strict = cfg.strict_layout;
    lo.min_area_mode = parse_min_area_mode(cfg.min_area_mode);
    lo.min_area_fraction = cfg.min_area_fraction;
    return lo;
}

MaskGenOptions mask_options(const PipelineConfig& cfg) {
    MaskGenOptions mo;
    mo.n_heads = cfg.mask_heads;
    mo.n_layers = cfg.mask_layers;
    mo.n_timesteps = cfg.mask_timesteps;
    mo.d_e = cfg.d_e;
    mo.xi = cfg.xi;
    mo.phi = cfg.phi;
    return mo;
}

json bubbles_json(const ResolveResult& rr, const std::vector<std::string>& glyph_warnings) {
    json j;
    j["unresolved"] = rr.unresolved;
    j["passes"] = rr.passes;
    j["warnings"] = glyph_warnings;
    j["bubbles"] = json::array();
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
        j["bubbles"].push_back(bj);
    }
    return j;
}

int cmd_expand(const Common& common, const std::string& story_path,
               const std::string& demos_path) {
    PipelineConfig cfg = effective_config(common);
    StoryBundle story = load_story(story_path);
    std::string demos_file = demos_path.empty() ? cfg.demos_file : demos_path;
    if (demos_file.empty()) {
        throw ConfigError("no demonstrations: pass --demos or set demos_file in the config");
    }
    DemonstrationSet demos = load_demonstrations(demos_file);
    std::unique_ptr<LlmBackend> backend = make_backend(cfg.backend);
    StoryBundle expanded =
        expand_story(story, demos, *backend, cfg.k_candidates, derive_seed(cfg.seed, "expand"));
    fs::path out = ensure_out(cfg);
    fs::path story_out = out / "expanded_story.json";
    write_file(story_out, story_to_json(expanded));
    std::cout << "expanded " << expanded.frame_count << " frames -> " << story_out.string()
              << "\n";
    return 0;
}

int cmd_layout(const Common& common, const std::string& story_path, const std::string& desc_arg,
               const std::string& desc_file, int frame) {
    PipelineConfig cfg = effective_config(common);
    StoryBundle story = load_story(story_path);
    std::string desc = desc_arg;
    if (!desc_file.empty()) desc = trim(read_file(desc_file));
    if (desc.empty()) throw ConfigError("pass --desc or --desc-file with the frame description");

    std::unique_ptr<LlmBackend> backend = make_backend(cfg.backend);
    std::uint64_t frame_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(frame)});
    auto [layout, trace] =
        correct_layout_iteratively(desc, story.characters, *backend, cfg.max_layout_iters,
                                   derive_seed(frame_seed, "layout"), layout_options(cfg));

    fs::path out = ensure_out(cfg);
    fs::path layout_out = out / "layout.txt";
    write_file(layout_out, serialize_layout(layout));
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::printf("iter %zu: e_rec=%.9g cos=%.6g jac=%.6g edit=%.6g\n", i + 1, trace[i].e_rec,
                    trace[i].cos, trace[i].jac, trace[i].edit);
    }
    for (const std::string& w : layout.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "layout (" << layout.boxes.size() << " boxes) -> " << layout_out.string()
              << "\n";
    return 0;
}

int cmd_mask(const Common& common, const std::string& layout_path, int frame) {
    PipelineConfig cfg = effective_config(common);
    FrameLayout layout = parse_layout(read_file(layout_path), layout_options(cfg));
    std::uint64_t frame_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(frame)});
    LatentDims dims{cfg.latent_height, cfg.latent_width};
    MaskSet masks =
        generate_masks(layout, dims, derive_seed(frame_seed, "mask"), mask_options(cfg));

    fs::path out = ensure_out(cfg);
    json mask_j;
    BoolGrid union_support =
        BoolGrid::Constant(masks.composite.rows(), masks.composite.cols(), false);
    for (const SaliencyMask& m : masks.per_character) {
        union_support = union_support || (m.m_refined.array() > 0.0);
    }
    mask_j["union_support"] = static_cast<std::int64_t>(union_support.count());
    mask_j["characters"] = json::array();
    for (std::size_t b = 0; b < masks.per_character.size(); ++b) {
        const SaliencyMask& m = masks.per_character[b];
        std::string name = "char_" + std::to_string(b + 1) + ".mask.hmap";
        write_file(out / name, hmap_to_bytes(mask_to_heatmap(m.m_refined)));
        json cj;
        cj["id"] = layout.boxes[b].character_id;
        cj["box_index"] = static_cast<int>(b) + 1;
        cj["eta"] = m.eta;
        cj["support"] = static_cast<std::int64_t>((m.m_refined.array() > 0.0).count());
        cj["mask_file"] = name;
        cj["warnings"] = m.warnings;
        mask_j["characters"].push_back(cj);
        std::printf("box %zu (%s): eta=%.6g support=%lld\n", b + 1,
                    layout.boxes[b].character_id.c_str(), m.eta,
                    static_cast<long long>((m.m_refined.array() > 0.0).count()));
    }
    write_file(out / "composite.hmap", hmap_to_bytes(mask_to_heatmap(masks.composite)));
    write_file(out / "maskset.json", mask_j.dump(2) + "\n");
    std::cout << "masks -> " << (out / "maskset.json").string() << "\n";
    return 0;
}

int cmd_compose(const Common& common, const std::string& layout_path,
                const std::string& story_path, int frame) {
    PipelineConfig cfg = effective_config(common);
    StoryBundle story = load_story(story_path);
    FrameLayout layout = parse_layout(read_file(layout_path), layout_options(cfg));

    // bank rows in box order, looked up from the story roster
    std::vector<CharacterSpec> cast;
    for (const LayoutBox& box : layout.boxes) {
        const CharacterSpec* found = nullptr;
        for (const CharacterSpec& s : story.characters) {
            if (s.id == box.character_id) {
                found = &s;
                break;
            }
        }
        if (found == nullptr) {
            throw ConfigError("layout names unknown character: " + box.character_id);
        }
        cast.push_back(*found);
    }

    std::uint64_t frame_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(frame)});
    LatentDims dims{cfg.latent_height, cfg.latent_width};
    MaskSet masks =
        generate_masks(layout, dims, derive_seed(frame_seed, "mask"), mask_options(cfg));
    CharacterBank bank =
        build_character_db(cast, cfg.n_char_tokens, cfg.d_e, derive_seed(cfg.seed, "bank"));
    AttentionProjections proj =
        make_projections(cfg.attn_layers, cfg.d_e, derive_seed(cfg.seed, "proj"));

    OptimizeOptions oo;
    oo.steps = cfg.steps;
    oo.delta_omega = cfg.delta_omega;
    oo.lr = cfg.lr;
    oo.guidance_scale = cfg.guidance_scale;
    oo.rank = cfg.lora_rank;
    oo.alpha = cfg.lora_alpha;
    OptimizeResult fg = optimize_fg_latent(masks, bank, proj, derive_seed(frame_seed, "fg"), oo);

    DenoiseOptions dn;
    dn.lambda = cfg.lambda;
    dn.steps = cfg.steps;
    LatentTensor z_bg =
        denoise_background(fg.z_fg, layout.bg_prompt, proj, derive_seed(frame_seed, "bg"), dn);

    Image img_fg = decode_latent(fg.z_fg, cfg.image_upscale, derive_seed(frame_seed, "decode_fg"));
    Image img_bg = decode_latent(z_bg, cfg.image_upscale, derive_seed(frame_seed, "decode_bg"));
    Image panel = blend_panel(img_bg, img_fg, masks.composite);

    fs::path out = ensure_out(cfg);
    const bool png = cfg.image_format == "png";
    fs::path panel_out = out / (png ? "panel.png" : "panel.ppm");
    write_file(panel_out, png ? png_to_bytes(panel) : ppm_to_bytes(panel));
    write_file(out / "z_fg.hmap", hmap_to_bytes(latent_to_hmap(fg.z_fg)));
    write_file(out / "z_bg.hmap", hmap_to_bytes(latent_to_hmap(z_bg)));
    if (!fg.trace.empty()) {
        std::printf("energy %.6g -> %.6g over %zu updates\n", fg.trace.front().before,
                    fg.trace.back().after, fg.trace.size());
    }
    std::cout << "panel " << panel.width << "x" << panel.height << " -> " << panel_out.string()
              << "\n";
    return 0;
}

int cmd_bubbles(const Common& common, const std::string& image_path,
                const std::string& heatmaps_dir, const std::string& dialogues_path,
                int font_size, CLI::Option* font_opt, double suppression_scale,
                CLI::Option* scale_opt) {
    PipelineConfig cfg = effective_config(common);
    if (font_opt->count() > 0) cfg.bubbles.font_size_init = font_size;
    if (scale_opt->count() > 0) cfg.suppression_scale = suppression_scale;

    Image img = read_ppm(image_path);
    std::vector<Dialogue> dialogues;
    for (const std::string& raw : split_lines(read_file(dialogues_path))) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::size_t colon = line.find(':');
        if (colon == std::string::npos || colon == 0) {
            throw FormatError("dialogue line needs 'speaker: utterance': " + line, 0);
        }
        Dialogue d;
        d.character_id = trim(line.substr(0, colon));
        d.utterance = trim(line.substr(colon + 1));
        dialogues.push_back(std::move(d));
    }
    if (dialogues.empty()) throw EmptyText("dialogue file has no speaker lines");

    GetLocationOptions glo;
    glo.suppression_scale = cfg.suppression_scale;
    std::vector<BubblePlacement> placed;
    std::vector<std::pair<int, int>> used;
    for (const Dialogue& d : dialogues) {
        fs::path clipseg = fs::path(heatmaps_dir) / (d.character_id + ".clipseg.hmap");
        fs::path plain = fs::path(heatmaps_dir) / (d.character_id + ".hmap");
        fs::path src = fs::exists(clipseg) ? clipseg : plain;
        if (!fs::exists(src)) {
            throw IoError("no head map for speaker " + d.character_id + " under " + heatmaps_dir);
        }
        Heatmap m = load_hmap(src);
        std::vector<Heatmap> maps;
        if (m.channels == 2) {
            Heatmap a = make_heatmap(m.height, m.width, 1);
            Heatmap b = make_heatmap(m.height, m.width, 1);
            for (int r = 0; r < m.height; ++r) {
                for (int c = 0; c < m.width; ++c) {
                    a.at(r, c, 0) = m.at(r, c, 0);
                    b.at(r, c, 0) = m.at(r, c, 1);
                }
            }
            maps = {a, b};
        } else if (m.channels == 1) {
            maps = {m, m};
        } else {
            throw DimMismatch("head map " + src.string() + " must have 1 or 2 channels");
        }
        HeadLocation head = get_location(img.width, img.height, maps, used, glo);
        used.emplace_back(head.x, head.y);
        CharacterSpec spec;
        spec.id = d.character_id;
        spec.name = d.character_id;
        placed.push_back(place_bubble(spec, head, d.utterance, img.width, img.height,
                                      cfg.bubbles));
    }
    ResolveResult rr = resolve_conflicts(std::move(placed), img.width, img.height);
    GlyphProvider font;
    std::vector<std::string> glyph_warnings = draw_bubbles(&img, rr.bubbles, font);

    fs::path out = ensure_out(cfg);
    const bool png = cfg.image_format == "png";
    fs::path img_out = out / (png ? "bubbled.png" : "bubbled.ppm");
    write_file(img_out, png ? png_to_bytes(img) : ppm_to_bytes(img));
    write_file(out / "bubbles.json", bubbles_json(rr, glyph_warnings).dump(2) + "\n");
    for (const BubblePlacement& b : rr.bubbles) {
        std::printf("%s: head (%d,%d) bubble %dx%d at (%d,%d)\n", b.character_id.c_str(),
                    b.head_x, b.head_y, b.w_bubble, b.h_bubble, b.x_b, b.y_b);
    }
    for (const std::string& w : glyph_warnings) std::cout << "warning: " << w << "\n";
    if (rr.unresolved) std::cout << "warning: conflicts unresolved after 3 passes\n";
    std::cout << "bubbled image -> " << img_out.string() << "\n";
    return 0;
}

int cmd_run(const Common& common, const std::string& story_path, const std::string& heatmaps_dir,
            double suppression_scale, CLI::Option* scale_opt) {
    PipelineConfig cfg = effective_config(common);
    if (!heatmaps_dir.empty()) cfg.heatmaps_dir = heatmaps_dir;
    if (scale_opt->count() > 0) cfg.suppression_scale = suppression_scale;

    RunResult rr = run_pipeline(cfg, story_path);
    if (!rr.run_error.empty()) {
        std::cerr << "error: " << rr.run_error << "\n";
        return 1;
    }
    for (const PanelArtifact& a : rr.frames) {
        if (a.error.empty()) {
            std::cout << "frame " << a.frame_index << ": ok (" << a.image_file << ")\n";
        } else {
            std::cout << "frame " << a.frame_index << ": error " << a.error << "\n";
        }
        for (const std::string& w : a.warnings) {
            std::cout << "  warning: " << w << "\n";
        }
    }
    std::cout << "manifest: " << (fs::path(cfg.out_dir) / rr.manifest_file).string() << "\n";
    return rr.any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-character story-to-panel engine"};
    app.require_subcommand(1);

    Common c_expand, c_layout, c_mask, c_compose, c_bubbles, c_run;

    CLI::App* s_expand = app.add_subcommand("expand", "expand a story skeleton into frames");
    add_common(s_expand, &c_expand);
    std::string ex_story, ex_demos;
    s_expand->add_option("--story", ex_story, "story JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    s_expand->add_option("--demos", ex_demos, "demonstrations file")->check(CLI::ExistingFile);

    CLI::App* s_layout = app.add_subcommand("layout", "propose and refine a frame layout");
    add_common(s_layout, &c_layout);
    std::string ly_story, ly_desc, ly_desc_file;
    int ly_frame = 1;
    s_layout->add_option("--story", ly_story, "story JSON file (character roster)")
        ->required()
        ->check(CLI::ExistingFile);
    s_layout->add_option("--desc", ly_desc, "frame description text");
    s_layout->add_option("--desc-file", ly_desc_file, "file holding the frame description")
        ->check(CLI::ExistingFile);
    s_layout->add_option("--frame", ly_frame, "frame index for the seed stream")
        ->check(CLI::PositiveNumber);

    CLI::App* s_mask = app.add_subcommand("mask", "generate saliency masks for a layout");
    add_common(s_mask, &c_mask);
    std::string mk_layout;
    int mk_frame = 1;
    s_mask->add_option("--layout", mk_layout, "layout wire-format file")
        ->required()
        ->check(CLI::ExistingFile);
    s_mask->add_option("--frame", mk_frame, "frame index for the seed stream")
        ->check(CLI::PositiveNumber);

    CLI::App* s_compose = app.add_subcommand("compose", "optimize latents and decode a panel");
    add_common(s_compose, &c_compose);
    std::string cp_layout, cp_story;
    int cp_frame = 1;
    s_compose->add_option("--layout", cp_layout, "layout wire-format file")
        ->required()
        ->check(CLI::ExistingFile);
    s_compose->add_option("--story", cp_story, "story JSON file (character roster)")
        ->required()
        ->check(CLI::ExistingFile);
    s_compose->add_option("--frame", cp_frame, "frame index for the seed stream")
        ->check(CLI::PositiveNumber);

    CLI::App* s_bubbles = app.add_subcommand("bubbles", "place and draw dialogue bubbles");
    add_common(s_bubbles, &c_bubbles);
    std::string bb_image, bb_heatmaps, bb_dialogues;
    int bb_font_size = 16;
    double bb_scale = 1.0;
    s_bubbles->add_option("--image", bb_image, "panel image (PPM)")
        ->required()
        ->check(CLI::ExistingFile);
    s_bubbles->add_option("--heatmaps", bb_heatmaps, "directory of <speaker>.hmap head maps")
        ->required()
        ->check(CLI::ExistingDirectory);
    s_bubbles->add_option("--dialogues", bb_dialogues, "file of 'speaker: utterance' lines")
        ->required()
        ->check(CLI::ExistingFile);
    CLI::Option* bb_font_opt =
        s_bubbles->add_option("--font-size", bb_font_size, "initial font size")
            ->check(CLI::PositiveNumber);
    CLI::Option* bb_scale_opt =
        s_bubbles
            ->add_option("--suppression-scale", bb_scale,
                         "scales the head-suppression radius and window")
            ->check(CLI::PositiveNumber);

    CLI::App* s_run = app.add_subcommand("run", "full story-to-panels pipeline");
    add_common(s_run, &c_run);
    std::string rn_story, rn_heatmaps;
    double rn_scale = 1.0;
    s_run->add_option("--story", rn_story, "story JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    s_run->add_option("--heatmaps", rn_heatmaps, "directory of external head maps")
        ->check(CLI::ExistingDirectory);
    CLI::Option* rn_scale_opt =
        s_run
            ->add_option("--suppression-scale", rn_scale,
                         "scales the head-suppression radius and window")
            ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_expand->parsed()) return cmd_expand(c_expand, ex_story, ex_demos);
        if (s_layout->parsed()) {
            return cmd_layout(c_layout, ly_story, ly_desc, ly_desc_file, ly_frame);
        }
        if (s_mask->parsed()) return cmd_mask(c_mask, mk_layout, mk_frame);
        if (s_compose->parsed()) return cmd_compose(c_compose, cp_layout, cp_story, cp_frame);
        if (s_bubbles->parsed()) {
            return cmd_bubbles(c_bubbles, bb_image, bb_heatmaps, bb_dialogues, bb_font_size,
                               bb_font_opt, bb_scale, bb_scale_opt);
        }
        if (s_run->parsed()) return cmd_run(c_run, rn_story, rn_heatmaps, rn_scale, rn_scale_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
