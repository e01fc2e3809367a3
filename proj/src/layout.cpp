// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "taleforge/errors.hpp"
#include "taleforge/rng.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

namespace {

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double parse_coord(const std::string& field, const std::string& line) {
    try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        if (used != field.size() || !std::isfinite(v)) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw LayoutParseError(LayoutParseError::Kind::Malformed,
                               "layout: bad coordinate '" + field + "' in line: " + line);
    }
}

double min_area_threshold(std::size_t n_boxes, const LayoutOptions& opts) {
    if (opts.min_area_fraction) return *opts.min_area_fraction;
    switch (opts.min_area_mode) {
        case MinAreaMode::Off:
            return 0.0;
        case MinAreaMode::Literal:
            return 0.25;
        case MinAreaMode::Scaled:
            return n_boxes <= 2 ? 0.25 : 0.25 / static_cast<double>(n_boxes);
    }
    return 0.0;
}

}  // namespace

MinAreaMode parse_min_area_mode(const std::string& name) {
    if (name == "literal") return MinAreaMode::Literal;
    if (name == "off") return MinAreaMode::Off;
    return MinAreaMode::Scaled;
}

std::vector<std::string> validate_layout(const FrameLayout& layout, const LayoutOptions& opts) {
    std::vector<std::string> violations;
    if (layout.boxes.size() > 4) {
        violations.push_back("TooManyBoxes: " + std::to_string(layout.boxes.size()) +
                             " boxes, limit 4");
    }
    if (layout.fg_prompts.size() != layout.boxes.size()) {
        violations.push_back("PromptCountMismatch: " + std::to_string(layout.fg_prompts.size()) +
                             " prompts for " + std::to_string(layout.boxes.size()) + " boxes");
    }
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
        const LayoutBox& b = layout.boxes[i];
        if (b.x0 < 0 || b.x1 > 1 || b.y0 < 0 || b.y1 > 1) {
            violations.push_back("OutOfRange: box " + std::to_string(i));
        }
        if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) {
            violations.push_back("DegenerateBox: box " + std::to_string(i));
        }
    }
    double threshold = min_area_threshold(layout.boxes.size(), opts);
    if (threshold > 0.0) {
        for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
            const LayoutBox& b = layout.boxes[i];
            double area = (b.x1 - b.x0) * (b.y1 - b.y0);
            if (area < threshold) {
                violations.push_back("MinAreaViolation: box " + std::to_string(i) + " area " +
                                     fmt_coord(area) + " < " + fmt_coord(threshold));
            }
        }
    }
    return violations;
}

FrameLayout parse_layout(const std::string& text, const LayoutOptions& opts) {
    FrameLayout layout;
    std::map<int, std::string> fg_by_index;
    bool saw_bg = false;
    for (const std::string& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (starts_with(line, "BOX ")) {
            std::vector<std::string> fields = tokenize_ws(line);
            if (fields.size() != 6) {
                throw LayoutParseError(LayoutParseError::Kind::Malformed,
                                       "layout: BOX line needs 6 fields: " + line);
            }
            LayoutBox box;
            box.character_id = fields[1];
            box.x0 = parse_coord(fields[2], line);
            box.y0 = parse_coord(fields[3], line);
            box.x1 = parse_coord(fields[4], line);
            box.y1 = parse_coord(fields[5], line);
            double cx0 = std::clamp(box.x0, 0.0, 1.0);
            double cy0 = std::clamp(box.y0, 0.0, 1.0);
            double cx1 = std::clamp(box.x1, 0.0, 1.0);
            double cy1 = std::clamp(box.y1, 0.0, 1.0);
            if (cx0 != box.x0 || cy0 != box.y0 || cx1 != box.x1 || cy1 != box.y1) {
                layout.warnings.push_back("clipped box " + std::to_string(layout.boxes.size()) +
                                          " to [0,1]");
                box.x0 = cx0;
                box.y0 = cy0;
                box.x1 = cx1;
                box.y1 = cy1;
            }
            if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) {
                throw LayoutParseError(LayoutParseError::Kind::DegenerateBox,
                                       "layout: degenerate box after clipping: " + line);
            }
            layout.boxes.push_back(std::move(box));
        } else if (starts_with(line, "FG ")) {
            std::istringstream ls(line.substr(3));
            int index = 0;
            if (!(ls >> index) || index < 1) {
                throw LayoutParseError(LayoutParseError::Kind::Malformed,
                                       "layout: bad FG index: " + line);
            }
            std::string prompt;
            std::getline(ls, prompt);
            prompt = trim(prompt);
            if (prompt.empty()) {
                throw LayoutParseError(LayoutParseError::Kind::Malformed,
                                       "layout: empty FG prompt: " + line);
            }
            fg_by_index[index] = prompt;
        } else if (starts_with(line, "BG ") || line == "BG") {
            layout.bg_prompt = line == "BG" ? "" : trim(line.substr(3));
            if (layout.bg_prompt.empty()) {
                throw LayoutParseError(LayoutParseError::Kind::Malformed,
                                       "layout: empty BG prompt");
            }
            saw_bg = true;
        }
        // other lines: tolerated backend preamble
    }
    if (layout.boxes.empty()) {
        throw LayoutParseError(LayoutParseError::Kind::Malformed, "layout: no BOX lines");
    }
    if (!saw_bg) {
        throw LayoutParseError(LayoutParseError::Kind::Malformed, "layout: missing BG line");
    }
    if (fg_by_index.size() != layout.boxes.size()) {
        throw LayoutParseError(LayoutParseError::Kind::Malformed,
                               "layout: FG count " + std::to_string(fg_by_index.size()) +
                                   " does not match " + std::to_string(layout.boxes.size()) +
                                   " boxes");
    }
    layout.fg_prompts.resize(layout.boxes.size());
    for (const auto& [index, prompt] : fg_by_index) {
        if (index > static_cast<int>(layout.boxes.size())) {
            throw LayoutParseError(LayoutParseError::Kind::Malformed,
                                   "layout: FG index " + std::to_string(index) + " out of range");
        }
        layout.fg_prompts[index - 1] = prompt;
    }

    std::vector<std::string> violations = validate_layout(layout, opts);
    if (!violations.empty()) {
        if (opts.strict) {
            LayoutParseError::Kind kind = LayoutParseError::Kind::Malformed;
            if (starts_with(violations.front(), "TooManyBoxes")) {
                kind = LayoutParseError::Kind::TooManyBoxes;
            } else if (starts_with(violations.front(), "DegenerateBox")) {
                kind = LayoutParseError::Kind::DegenerateBox;
            }
            throw LayoutParseError(kind, "layout: " + join(violations, "; "));
        }
        for (const auto& v : violations) layout.warnings.push_back(v);
    }
    return layout;
}

std::string serialize_layout(const FrameLayout& layout) {
    std::ostringstream out;
    for (const LayoutBox& b : layout.boxes) {
        out << "BOX " << b.character_id << " " << fmt_coord(b.x0) << " " << fmt_coord(b.y0) << " "
            << fmt_coord(b.x1) << " " << fmt_coord(b.y1) << "\n";
    }
    for (std::size_t i = 0; i < layout.fg_prompts.size(); ++i) {
        out << "FG " << (i + 1) << " " << layout.fg_prompts[i] << "\n";
    }
    out << "BG " << layout.bg_prompt << "\n";
    return out.str();
}

std::string build_layout_prompt(const std::string& frame_desc,
                                const std::vector<CharacterSpec>& characters) {
    std::ostringstream out;
    out << "Propose a panel layout for the frame below.\n";
    out << "FRAME: " << frame_desc << "\n";
    for (const auto& c : characters) {
        out << "CHARACTER: " << c.id << " | " << c.name << " | " << c.physical_description
            << " | " << c.personality << "\n";
    }
    out << "Reply with one line per visible character\n";
    out << "  BOX <character_id> <x0> <y0> <x1> <y1>\n";
    out << "then one foreground prompt per box\n";
    out << "  FG <box number> <what is drawn in the box>\n";
    out << "then one background line\n";
    out << "  BG <background prompt>\n";
    out << "Coordinates are canvas fractions in [0,1], top-left origin. At most 4 boxes.\n";
    return out.str();
}

std::string build_refine_prompt(const std::string& frame_desc,
                                const std::vector<CharacterSpec>& characters,
                                const FrameLayout& previous, double previous_e_rec) {
    std::ostringstream out;
    out << build_layout_prompt(frame_desc, characters);
    out << "PREVIOUS LAYOUT:\n" << serialize_layout(previous);
    out << "PREVIOUS E_REC: " << fmt_coord(previous_e_rec) << "\n";
    out << "Adjust the layout so its reconstructed caption matches the frame better.\n";
    return out.str();
}

FrameLayout propose_layout(const std::string& frame_desc,
                           const std::vector<CharacterSpec>& characters, LlmBackend& backend,
                           std::uint64_t seed, const LayoutOptions& opts) {
    if (trim(frame_desc).empty()) {
        throw LayoutParseError(LayoutParseError::Kind::Malformed,
                               "propose_layout: empty frame description");
    }
    std::string completion = backend.complete(build_layout_prompt(frame_desc, characters), seed);
    return parse_layout(completion, opts);
}

namespace {

const char* vertical_band(double cy) {
    if (cy < 1.0 / 3.0) return "top";
    if (cy < 2.0 / 3.0) return "middle";
    return "bottom";
}

const char* horizontal_band(double cx) {
    if (cx < 1.0 / 3.0) return "left";
    if (cx < 2.0 / 3.0) return "center";
    return "right";
}

}  // namespace

std::string reconstruct_caption(const FrameLayout& layout) {
    std::vector<std::string> parts;
    std::vector<double> cx(layout.boxes.size()), cy(layout.boxes.size());
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
        const LayoutBox& b = layout.boxes[i];
        cx[i] = 0.5 * (b.x0 + b.x1);
        cy[i] = 0.5 * (b.y0 + b.y1);
        parts.push_back(layout.fg_prompts[i] + " at the " + vertical_band(cy[i]) + "-" +
                        horizontal_band(cx[i]));
    }
    for (std::size_t i = 0; i < layout.boxes.size(); ++i) {
        for (std::size_t j = 0; j < layout.boxes.size(); ++j) {
            if (i == j) continue;
            if (cx[j] - cx[i] > 0.15) {
                parts.push_back(layout.fg_prompts[i] + " is left of " + layout.fg_prompts[j]);
            }
            if (cy[j] - cy[i] > 0.15) {
                parts.push_back(layout.fg_prompts[i] + " is above " + layout.fg_prompts[j]);
            }
        }
    }
    parts.push_back("background: " + layout.bg_prompt);
    return join(parts, ". ");
}

ReconstructionError reconstruction_error(const std::string& original,
                                         const std::string& reconstructed, double mu1, double mu2,
                                         double mu3) {
    std::vector<std::string> ta = tokenize(original);
    std::vector<std::string> tb = tokenize(reconstructed);

    std::map<std::string, int> fa, fb;
    for (const auto& t : ta) ++fa[t];
    for (const auto& t : tb) ++fb[t];

    ReconstructionError err;
    if (fa == fb) {
        // exact path: equal term-frequency vectors have cosine exactly 1
        err.cos = 1.0;
    } else if (fa.empty() || fb.empty()) {
        err.cos = 0.0;
    } else {
        double dot = 0, na = 0, nb = 0;
        for (const auto& [t, c] : fa) {
            na += static_cast<double>(c) * c;
            auto it = fb.find(t);
            if (it != fb.end()) dot += static_cast<double>(c) * it->second;
        }
        for (const auto& [t, c] : fb) nb += static_cast<double>(c) * c;
        err.cos = dot / (std::sqrt(na) * std::sqrt(nb));
    }

    std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) {
        err.jac = 1.0;
    } else {
        std::size_t inter = 0;
        for (const auto& t : sa) inter += sb.count(t);
        err.jac = static_cast<double>(inter) /
                  static_cast<double>(sa.size() + sb.size() - inter);
    }

    std::size_t max_len = std::max(utf8_length(original), utf8_length(reconstructed));
    err.edit = max_len == 0
                   ? 0.0
                   : static_cast<double>(edit_distance(original, reconstructed)) /
                         static_cast<double>(max_len);

    err.e_rec = 1.0 - (mu1 * err.cos + mu2 * err.jac - mu3 * err.edit);
    return err;
}

std::pair<FrameLayout, std::vector<ReconstructionError>> correct_layout_iteratively(
    const std::string& frame_desc, const std::vector<CharacterSpec>& characters,
    LlmBackend& backend, int max_iters, std::uint64_t seed, const LayoutOptions& opts) {
    if (max_iters < 1) throw ConfigError("correct_layout_iteratively: max_iters must be >= 1");

    std::vector<ReconstructionError> trace;
    std::optional<FrameLayout> best;
    double best_e = std::numeric_limits<double>::infinity();
    std::optional<FrameLayout> prev;
    double prev_e = 0.0;
    double run_min = std::numeric_limits<double>::infinity();
    int streak = 0;
    std::string last_parse_error;

    for (int i = 1; i <= max_iters; ++i) {
        std::string prompt = prev ? build_refine_prompt(frame_desc, characters, *prev, prev_e)
                                  : build_layout_prompt(frame_desc, characters);
        std::uint64_t iter_seed = derive_seed(seed, {static_cast<std::uint64_t>(i)});
        std::string completion = backend.complete(prompt, iter_seed);

        FrameLayout layout;
        try {
            layout = parse_layout(completion, opts);
        } catch (const LayoutParseError& e) {
            last_parse_error = e.what();
            continue;  // failed iteration spends budget but adds no trace entry
        }

        std::string caption = reconstruct_caption(layout);
        ReconstructionError err = reconstruction_error(frame_desc, caption);
        trace.push_back(err);
        double delta = err.e_rec;

        if (delta < best_e) {
            best_e = delta;
            best = layout;
        }

        bool had_prev = prev.has_value();
        double prev_delta = prev_e;
        prev = std::move(layout);
        prev_e = delta;

        if (delta <= -1.0) break;  // perfect reconstruction, nothing to improve
        if (delta < run_min) {
            run_min = delta;
            streak = 1;
        } else {
            ++streak;
        }
        if (streak >= 2) break;
        if (had_prev && std::abs(prev_delta - delta) < 1e-4) break;
    }

    if (!best) {
        throw NoLayoutFound("correct_layout_iteratively: every iteration failed parsing (last: " +
                            last_parse_error + ")");
    }
    return {std::move(*best), std::move(trace)};
}

}  // namespace taleforge
