// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace taleforge {

struct CharacterSpec {
    std::string id;
    std::string name;
    std::string physical_description;
    std::string personality;
};

struct Dialogue {
    std::string character_id;
    std::string utterance;
};

struct StoryBundle {
    std::string story_text;
    int frame_count = 0;
    std::vector<CharacterSpec> characters;
    std::vector<std::string> frame_descriptions;      // length frame_count once expanded
    std::vector<std::vector<Dialogue>> dialogues;     // one list per frame
};

struct DemonstrationRecord {
    std::string summary;
    std::vector<CharacterSpec> characters;
    std::vector<std::string> frame_descriptions;
    std::vector<std::vector<Dialogue>> dialogues;
};

struct DemonstrationSet {
    std::vector<DemonstrationRecord> records;
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::string& prompt, std::uint64_t sampling_seed) = 0;
};

/// Canned completions keyed by prompt hash. The fixture file holds records
/// separated by `%%%` lines, each starting with `PROMPT_SHA256 <hex>`. Lookup
/// first tries sha256(prompt + "\nSAMPLING_SEED=<seed>"), then sha256(prompt).
class MockBackend : public LlmBackend {
public:
    explicit MockBackend(const std::filesystem::path& fixture_file);
    std::string complete(const std::string& prompt, std::uint64_t sampling_seed) override;

    static std::string prompt_key(const std::string& prompt, std::uint64_t sampling_seed);

private:
    std::vector<std::pair<std::string, std::string>> records_;  // (hash, completion)
};

struct WireConfig {
    std::string endpoint = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "taleforge-default";
    std::string api_key;  // falls back to TALEFORGE_LLM_KEY
    int timeout_seconds = 30;
};

/// Chat-completion HTTP client; retries transient failures up to 3 times
/// with exponential backoff.
class WireBackend : public LlmBackend {
public:
    explicit WireBackend(WireConfig config);
    std::string complete(const std::string& prompt, std::uint64_t sampling_seed) override;

private:
    WireConfig config_;
};

// --- demonstration fixtures ---

/// Serializes one record in the exemplar block body format:
/// SUMMARY:, CHARACTER: id | name | physical | personality,
/// then frames in the candidate wire format.
std::string serialize_demo_record(const DemonstrationRecord& record);
DemonstrationRecord parse_demo_record(const std::string& block);

/// Demo file: records wrapped in `=== DEMO ===` / `=== END DEMO ===`.
DemonstrationSet parse_demonstrations(const std::string& text);
DemonstrationSet load_demonstrations(const std::filesystem::path& path);

// --- prompt construction and parsing ---

/// Throws EmptyDemonstrations when demos has no records.
std::string build_icl_prompt(const DemonstrationSet& demos, const StoryBundle& story);

/// Extracts the exemplar block bodies back out of a built prompt.
std::vector<std::string> extract_prompt_examples(const std::string& prompt);

struct ParsedCandidate {
    std::vector<std::string> frame_descriptions;
    std::vector<std::vector<Dialogue>> dialogues;
};

/// Parses a completion in the candidate wire format (`=== FRAME k ===`
/// headers; `CHAR_ID: utterance` dialogue lines, id must be declared).
/// Returns nullopt when no frame parses or any description is empty.
std::optional<ParsedCandidate> parse_candidate(const std::string& completion,
                                               const StoryBundle& story);

double score_candidate(const ParsedCandidate& candidate, const StoryBundle& story);

/// Best-of-k selection: k completions with derived sampling seeds, each
/// parsed and scored; returns the filled bundle for the argmax (ties by
/// lowest candidate index).
StoryBundle expand_story(const StoryBundle& story, const DemonstrationSet& demos,
                         LlmBackend& backend, int k_candidates, std::uint64_t seed);

// --- story file ---

/// JSON with keys story, frames, characters[{id,name,physical_description,personality}].
StoryBundle load_story(const std::filesystem::path& path);

}  // namespace taleforge
