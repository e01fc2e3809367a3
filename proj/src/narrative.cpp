// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "taleforge/narrative.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "taleforge/errors.hpp"
#include "taleforge/rng.hpp"
#include "taleforge/sha256.hpp"
#include "taleforge/strutil.hpp"

namespace taleforge {

namespace {

const std::regex kFrameHeader(R"(^\s*===\s*FRAME\s+(\d+)\s*===\s*$)");

bool is_frame_header(const std::string& line) {
    return std::regex_match(line, kFrameHeader);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

/// Splits `id: utterance` when id is declared; returns false otherwise.
bool parse_dialogue_line(const std::string& line, const std::set<std::string>& ids,
                         Dialogue* out) {
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) return false;
    std::string prefix = trim(line.substr(0, colon));
    if (!ids.count(prefix)) return false;
    out->character_id = prefix;
    out->utterance = trim(line.substr(colon + 1));
    return !out->utterance.empty();
}

struct FrameBlock {
    std::string description;
    std::vector<Dialogue> dialogues;
};

/// Shared body parser for candidates and demo records: frame headers split
/// sections; declared-id dialogue lines are dialogue, the rest is description.
std::vector<FrameBlock> parse_frame_blocks(const std::vector<std::string>& lines,
                                           const std::set<std::string>& ids) {
    std::vector<FrameBlock> frames;
    std::vector<std::string> desc_parts;
    bool in_frame = false;
    auto flush_desc = [&]() {
        if (!frames.empty()) frames.back().description = join(desc_parts, " ");
        desc_parts.clear();
    };
    for (const std::string& raw : lines) {
        std::string line = trim(raw);
        if (is_frame_header(raw) || is_frame_header(line)) {
            flush_desc();
            frames.emplace_back();
            in_frame = true;
            continue;
        }
        if (!in_frame || line.empty()) continue;
        Dialogue d;
        if (parse_dialogue_line(line, ids, &d)) {
            frames.back().dialogues.push_back(std::move(d));
        } else {
            desc_parts.push_back(line);
        }
    }
    flush_desc();
    return frames;
}

std::set<std::string> id_set(const std::vector<CharacterSpec>& chars) {
    std::set<std::string> ids;
    for (const auto& c : chars) ids.insert(c.id);
    return ids;
}

}  // namespace

// --- demonstration records ---

std::string serialize_demo_record(const DemonstrationRecord& record) {
    std::ostringstream out;
    out << "SUMMARY: " << record.summary << "\n";
    for (const auto& c : record.characters) {
        out << "CHARACTER: " << c.id << " | " << c.name << " | " << c.physical_description
            << " | " << c.personality << "\n";
    }
    for (std::size_t i = 0; i < record.frame_descriptions.size(); ++i) {
        out << "=== FRAME " << (i + 1) << " ===\n";
        out << record.frame_descriptions[i] << "\n";
        if (i < record.dialogues.size()) {
            for (const auto& d : record.dialogues[i]) {
                out << d.character_id << ": " << d.utterance << "\n";
            }
        }
    }
    return out.str();
}

DemonstrationRecord parse_demo_record(const std::string& block) {
    DemonstrationRecord rec;
    std::vector<std::string> lines = split_lines(block);
    std::vector<std::string> body;
    for (const std::string& raw : lines) {
        std::string line = trim(raw);
        if (starts_with(line, "SUMMARY:")) {
            rec.summary = trim(line.substr(8));
        } else if (starts_with(line, "CHARACTER:")) {
            std::vector<std::string> fields = split(line.substr(10), '|');
            if (fields.size() != 4) {
                throw FormatError("demo record: CHARACTER line needs 4 fields: " + line, 0);
            }
            rec.characters.push_back({trim(fields[0]), trim(fields[1]), trim(fields[2]),
                                      trim(fields[3])});
        } else {
            body.push_back(raw);
        }
    }
    std::vector<FrameBlock> frames = parse_frame_blocks(body, id_set(rec.characters));
    for (auto& f : frames) {
        rec.frame_descriptions.push_back(std::move(f.description));
        rec.dialogues.push_back(std::move(f.dialogues));
    }
    return rec;
}

DemonstrationSet parse_demonstrations(const std::string& text) {
    DemonstrationSet set;
    std::vector<std::string> lines = split_lines(text);
    std::vector<std::string> current;
    bool in_record = false;
    for (const std::string& raw : lines) {
        std::string line = trim(raw);
        if (line == "=== DEMO ===") {
            in_record = true;
            current.clear();
            continue;
        }
        if (line == "=== END DEMO ===") {
            if (in_record) set.records.push_back(parse_demo_record(join(current, "\n")));
            in_record = false;
            continue;
        }
        if (in_record) current.push_back(raw);
    }
    return set;
}

DemonstrationSet load_demonstrations(const std::filesystem::path& path) {
    return parse_demonstrations(read_file(path));
}

// --- prompt ---

std::string build_icl_prompt(const DemonstrationSet& demos, const StoryBundle& story) {
    if (demos.records.empty()) {
        throw EmptyDemonstrations("build_icl_prompt: demonstration set is empty");
    }
    std::ostringstream out;
    out << "You expand short stories into per-frame comic descriptions with dialogue.\n";
    out << "Study the examples, then complete the task in the same format.\n\n";
    for (std::size_t i = 0; i < demos.records.size(); ++i) {
        out << "=== EXAMPLE " << (i + 1) << " ===\n";
        out << serialize_demo_record(demos.records[i]);
        out << "=== END EXAMPLE ===\n\n";
    }
    out << "=== TASK ===\n";
    out << "STORY: " << story.story_text << "\n";
    out << "FRAMES REQUIRED: " << story.frame_count << "\n";
    for (const auto& c : story.characters) {
        out << "CHARACTER: " << c.id << " | " << c.name << " | " << c.physical_description
            << " | " << c.personality << "\n";
    }
    out << "=== END TASK ===\n\n";
    out << "=== OUTPUT FORMAT ===\n";
    out << "Emit exactly " << story.frame_count << " frame blocks. Each block is\n";
    out << "a `=== FRAME k ===` header, one description line, then zero or more\n";
    out << "`character_id: utterance` dialogue lines. No other text.\n";
    return out.str();
}

std::vector<std::string> extract_prompt_examples(const std::string& prompt) {
    std::vector<std::string> blocks;
    std::vector<std::string> lines = split_lines(prompt);
    const std::regex header(R"(^===\s*EXAMPLE\s+\d+\s*===$)");
    std::vector<std::string> current;
    bool in_block = false;
    for (const std::string& raw : lines) {
        std::string line = trim(raw);
        if (std::regex_match(line, header)) {
            in_block = true;
            current.clear();
            continue;
        }
        if (line == "=== END EXAMPLE ===") {
            if (in_block) blocks.push_back(join(current, "\n"));
            in_block = false;
            continue;
        }
        if (in_block) current.push_back(raw);
    }
    return blocks;
}

// --- candidates ---

std::optional<ParsedCandidate> parse_candidate(const std::string& completion,
                                               const StoryBundle& story) {
    std::vector<FrameBlock> frames =
        parse_frame_blocks(split_lines(completion), id_set(story.characters));
    if (frames.empty()) return std::nullopt;
    ParsedCandidate cand;
    for (auto& f : frames) {
        if (trim(f.description).empty()) return std::nullopt;
        cand.frame_descriptions.push_back(std::move(f.description));
        cand.dialogues.push_back(std::move(f.dialogues));
    }
    return cand;
}

double score_candidate(const ParsedCandidate& candidate, const StoryBundle& story) {
    if (candidate.frame_descriptions.empty()) return 0.0;

    std::string concat = join(candidate.frame_descriptions, " ");
    std::vector<std::string> tokens = tokenize(concat);
    std::set<std::string> token_set(tokens.begin(), tokens.end());

    auto mentions = [&](const CharacterSpec& c) {
        if (token_set.count(to_lower(c.id))) return true;
        std::vector<std::string> name_tokens = tokenize(c.name);
        if (name_tokens.empty()) return false;
        for (std::size_t i = 0; i + name_tokens.size() <= tokens.size(); ++i) {
            bool all = true;
            for (std::size_t k = 0; k < name_tokens.size(); ++k) {
                if (tokens[i + k] != name_tokens[k]) {
                    all = false;
                    break;
                }
            }
            if (all) return true;
        }
        return false;
    };

    double char_frac = 1.0;
    if (!story.characters.empty()) {
        int hit = 0;
        for (const auto& c : story.characters) hit += mentions(c) ? 1 : 0;
        char_frac = static_cast<double>(hit) / static_cast<double>(story.characters.size());
    }

    double count_match =
        candidate.frame_descriptions.size() == static_cast<std::size_t>(story.frame_count) ? 1.0
                                                                                           : 0.0;

    int with_dialogue = 0;
    for (const auto& frame : candidate.dialogues) with_dialogue += frame.empty() ? 0 : 1;
    double dialogue_frac =
        static_cast<double>(with_dialogue) / static_cast<double>(candidate.frame_descriptions.size());

    std::vector<std::string> story_tokens = tokenize(story.story_text);
    std::set<std::string> story_set(story_tokens.begin(), story_tokens.end());
    std::size_t inter = 0;
    for (const auto& t : token_set) inter += story_set.count(t);
    std::size_t uni = story_set.size() + token_set.size() - inter;
    double jaccard = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);

    return 0.4 * char_frac + 0.3 * count_match + 0.2 * dialogue_frac + 0.1 * jaccard;
}

StoryBundle expand_story(const StoryBundle& story, const DemonstrationSet& demos,
                         LlmBackend& backend, int k_candidates, std::uint64_t seed) {
    if (k_candidates < 1) throw ConfigError("expand_story: k_candidates must be >= 1");
    std::string prompt = build_icl_prompt(demos, story);

    std::optional<ParsedCandidate> best;
    double best_score = -1.0;
    for (int j = 0; j < k_candidates; ++j) {
        std::uint64_t sampling_seed = derive_seed(seed, {static_cast<std::uint64_t>(j)});
        std::string completion = backend.complete(prompt, sampling_seed);
        std::optional<ParsedCandidate> cand = parse_candidate(completion, story);
        if (!cand) continue;
        double score = score_candidate(*cand, story);
        if (score > best_score) {  // strictly greater keeps the lowest index on ties
            best_score = score;
            best = std::move(cand);
        }
    }
    if (!best) {
        throw NoValidCandidate("expand_story: no candidate parsed out of " +
                               std::to_string(k_candidates));
    }
    if (best->frame_descriptions.size() != static_cast<std::size_t>(story.frame_count)) {
        throw NoValidCandidate("expand_story: best candidate has " +
                               std::to_string(best->frame_descriptions.size()) + " frames, need " +
                               std::to_string(story.frame_count));
    }
    StoryBundle filled = story;
    filled.frame_descriptions = std::move(best->frame_descriptions);
    filled.dialogues = std::move(best->dialogues);
    return filled;
}

// --- backends ---

MockBackend::MockBackend(const std::filesystem::path& fixture_file) {
    std::string text = read_file(fixture_file);
    std::vector<std::string> lines = split_lines(text);
    std::vector<std::string> current;
    auto flush = [&]() {
        // first non-empty line must be the hash header
        std::size_t i = 0;
        while (i < current.size() && trim(current[i]).empty()) ++i;
        if (i == current.size()) return;
        std::string header = trim(current[i]);
        if (!starts_with(header, "PROMPT_SHA256 ")) {
            throw FormatError("mock fixture: record missing PROMPT_SHA256 header", 0);
        }
        std::string hash = trim(header.substr(14));
        std::vector<std::string> body(current.begin() + static_cast<long>(i) + 1, current.end());
        while (!body.empty() && trim(body.front()).empty()) body.erase(body.begin());
        while (!body.empty() && trim(body.back()).empty()) body.pop_back();
        records_.emplace_back(hash, join(body, "\n"));
        current.clear();
    };
    for (const std::string& raw : lines) {
        if (trim(raw) == "%%%") {
            flush();
            current.clear();
        } else {
            current.push_back(raw);
        }
    }
    flush();
}

std::string MockBackend::prompt_key(const std::string& prompt, std::uint64_t sampling_seed) {
    return sha256_hex(prompt + "\nSAMPLING_SEED=" + std::to_string(sampling_seed));
}

std::string MockBackend::complete(const std::string& prompt, std::uint64_t sampling_seed) {
    std::string seeded = prompt_key(prompt, sampling_seed);
    std::string plain = sha256_hex(prompt);
    for (const auto& [hash, completion] : records_) {
        if (hash == seeded) return completion;
    }
    for (const auto& [hash, completion] : records_) {
        if (hash == plain) return completion;
    }
    throw BackendError("mock backend: no canned completion for prompt hash " + seeded);
}

WireBackend::WireBackend(WireConfig config) : config_(std::move(config)) {
    if (config_.api_key.empty()) {
        const char* env = std::getenv("TALEFORGE_LLM_KEY");
        if (env) config_.api_key = env;
    }
}

std::string WireBackend::complete(const std::string& prompt, std::uint64_t sampling_seed) {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", {{{"role", "user"}, {"content", prompt}}}},
        {"seed", sampling_seed},
        {"temperature", 0},
    };
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
        }
        httplib::Client cli(config_.endpoint);
        cli.set_connection_timeout(config_.timeout_seconds);
        cli.set_read_timeout(config_.timeout_seconds);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto res = cli.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw BackendError("wire backend: status " + std::to_string(res->status) + ": " +
                               res->body);
        }
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("wire backend: malformed reply: ") + e.what());
        }
    }
    throw BackendError("wire backend: retries exhausted (" + last_error + ")");
}

// --- story file ---

StoryBundle load_story(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("story file: " + path.string() + ": " + e.what());
    }
    StoryBundle story;
    try {
        story.story_text = j.at("story").get<std::string>();
        story.frame_count = j.at("frames").get<int>();
        for (const auto& c : j.at("characters")) {
            CharacterSpec spec;
            spec.id = c.at("id").get<std::string>();
            spec.name = c.at("name").get<std::string>();
            spec.physical_description = c.at("physical_description").get<std::string>();
            spec.personality = c.value("personality", "");
            story.characters.push_back(std::move(spec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("story file: " + path.string() + ": " + e.what());
    }
    if (story.frame_count < 1) throw ConfigError("story file: frames must be >= 1");
    std::set<std::string> seen;
    for (const auto& c : story.characters) {
        if (c.id.empty() || c.name.empty() || c.physical_description.empty()) {
            throw ConfigError("story file: character id/name/physical_description required");
        }
        if (!seen.insert(c.id).second) {
            throw ConfigError("story file: duplicate character id: " + c.id);
        }
    }
    return story;
}

}  // namespace taleforge
