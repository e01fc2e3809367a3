// Copyright (C) 2026 TaleForge Authors
// SPDX-License-Identifier: Apache-2.0

// Cuts the canned-completion fixture for the bundled kite story by running
// the real pipeline against a deterministic stand-in author and recording
// every (prompt, sampling seed) pair the run asked for.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "taleforge/errors.hpp"
#include "taleforge/narrative.hpp"
#include "taleforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace taleforge;

namespace {

struct FrameScript {
    const char* desc;
    const char* dialogue1;
    const char* dialogue2;
    const char* layout_v1;
    const char* layout_v2;
};

const FrameScript kFrames[] = {
    {
        "Mira kneels on the wet beach holding an old kite while Tomas watches the waves.",
        "mira: Look what the tide left us!",
        "tomas: That frame is still solid.",
        "BOX mira 0.05 0.40 0.55 0.95\n"
        "BOX tomas 0.50 0.30 0.95 0.90\n"
        "FG 1 mira kneels with the old kite\n"
        "FG 2 tomas watches\n"
        "BG beach\n",
        "BOX mira 0.05 0.40 0.55 0.95\n"
        "BOX tomas 0.50 0.30 0.95 0.90\n"
        "FG 1 mira kneels on the wet beach holding an old kite\n"
        "FG 2 tomas watches the waves\n"
        "BG the wet beach and the waves\n",
    },
    {
        "Mira and Tomas patch the kite with sail cloth as the wind picks up over the beach.",
        "tomas: Hold the seam tight.",
        "mira: The wind is rising already.",
        "BOX mira 0.05 0.25 0.50 0.90\n"
        "BOX tomas 0.48 0.25 0.93 0.90\n"
        "FG 1 mira patches the kite\n"
        "FG 2 tomas holds the cloth\n"
        "BG windy beach\n",
        "BOX mira 0.05 0.25 0.50 0.90\n"
        "BOX tomas 0.48 0.25 0.93 0.90\n"
        "FG 1 mira and tomas patch the kite with sail cloth\n"
        "FG 2 tomas patches the kite as the wind picks up\n"
        "BG the beach as the wind picks up\n",
    },
    {
        "At sunset the kite climbs over the dunes while Mira and Tomas cheer from the sand.",
        "mira: It flies!",
        "tomas: Higher than the dunes!",
        "BOX mira 0.05 0.42 0.52 0.98\n"
        "BOX tomas 0.52 0.40 0.97 0.98\n"
        "FG 1 mira cheers\n"
        "FG 2 tomas cheers\n"
        "BG sunset dunes\n",
        "BOX mira 0.05 0.42 0.52 0.98\n"
        "BOX tomas 0.52 0.40 0.97 0.98\n"
        "FG 1 mira cheers from the sand as the kite climbs\n"
        "FG 2 tomas cheers while the kite climbs over the dunes at sunset\n"
        "BG sunset over the dunes and the sand\n",
    },
};

std::string authored_expansion() {
    std::string out;
    for (std::size_t i = 0; i < std::size(kFrames); ++i) {
        out += "=== FRAME " + std::to_string(i + 1) + " ===\n";
        out += std::string(kFrames[i].desc) + "\n";
        out += std::string(kFrames[i].dialogue1) + "\n";
        out += std::string(kFrames[i].dialogue2) + "\n";
    }
    return out;
}

// Pure function of the prompt text: expansion prompts get the authored
// frames, first-pass layout prompts get v1, refine prompts get v2.
class AuthorBackend : public LlmBackend {
public:
    std::string complete(const std::string& prompt, std::uint64_t) override {
        if (prompt.find("=== OUTPUT FORMAT ===") != std::string::npos) {
            return authored_expansion();
        }
        std::size_t tag = prompt.find("FRAME: ");
        if (tag == std::string::npos) {
            throw BackendError("author: prompt has no FRAME line");
        }
        std::size_t eol = prompt.find('\n', tag);
        std::string desc = prompt.substr(tag + 7, eol - (tag + 7));
        bool refine = prompt.find("PREVIOUS LAYOUT:") != std::string::npos;
        for (const FrameScript& f : kFrames) {
            if (desc == f.desc) return refine ? f.layout_v2 : f.layout_v1;
        }
        throw BackendError("author: unscripted frame description: " + desc);
    }
};

// Wraps the author, remembering each distinct (prompt, seed) key with its
// completion in first-use order.
class RecordingBackend : public LlmBackend {
public:
    explicit RecordingBackend(LlmBackend* inner) : inner_(inner) {}

    std::string complete(const std::string& prompt, std::uint64_t sampling_seed) override {
        std::string key = MockBackend::prompt_key(prompt, sampling_seed);
        std::string completion = inner_->complete(prompt, sampling_seed);
        if (seen_.insert(key).second) records_.emplace_back(std::move(key), completion);
        return completion;
    }

    void write(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        for (const auto& [key, completion] : records_) {
            out << "PROMPT_SHA256 " << key << "\n" << completion;
            if (completion.empty() || completion.back() != '\n') out << "\n";
            out << "%%%\n";
        }
        out.flush();
        if (!out) throw IoError("write failed: " + path.string());
    }

    std::size_t size() const { return records_.size(); }

private:
    LlmBackend* inner_;
    std::set<std::string> seen_;
    std::vector<std::pair<std::string, std::string>> records_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"record a canned-completion fixture from a scripted pipeline run"};
    std::string config_path, story_path, out_fixture, work_dir = "fixturegen_work";
    app.add_option("--config", config_path, "pipeline config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--story", story_path, "story JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out-fixture", out_fixture, "fixture file to write")->required();
    app.add_option("--work-dir", work_dir, "scratch directory for the recording run");
    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = load_config(config_path);
        cfg.workers = 1;
        cfg.out_dir = work_dir;
        StoryBundle story = load_story(story_path);

        AuthorBackend author;
        RecordingBackend recorder(&author);
        RunResult rr = run_pipeline(cfg, story, recorder);

        if (!rr.run_error.empty()) {
            std::cerr << "recording run failed: " << rr.run_error << "\n";
            return 1;
        }
        bool failed = false;
        for (const PanelArtifact& a : rr.frames) {
            if (!a.error.empty()) {
                std::cerr << "frame " << a.frame_index << " failed: " << a.error << "\n";
                failed = true;
            }
        }
        if (failed) return 1;

        recorder.write(out_fixture);
        std::cout << "recorded " << recorder.size() << " completions -> " << out_fixture << "\n";
        std::cout << "scratch artifacts under " << work_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
