#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decensor/cer.hpp"
#include "decensor/corpus.hpp"
#include "decensor/entity_recognition.hpp"
#include "decensor/evaluation.hpp"

namespace decensor {

enum class ScopeMode { Pooled, PerPost };

struct RunConfig {
    std::filesystem::path corpus_path;
    std::vector<std::string> gazetteer;
    std::vector<std::string> denylist{"Facebook", "Wikileaks", "Twitter", "Google"};
    std::vector<std::string> title_markers{"Mr", "Mrs", "Ms", "Dr", "Prof", "Sen", "Rep"};
    bool use_heuristic = true;

    std::size_t k = 10;
    std::size_t nocc_min = 100;               // corpus-wide occurrence floor
    std::size_t comment_occurrence_min = 50;  // floor over the censored posts' comments
    std::size_t max_posts = 20;
    std::size_t window = kSnippetWindow;
    std::size_t min_len = kSnippetMinLen;

    CerHyperparameters hparams;
    std::uint64_t seed = 1;
    std::uint64_t mask_seed = 0;  // 0: derived from seed
    ScopeMode scope_mode = ScopeMode::Pooled;
    bool chronological_first = false;

    std::size_t workers = 1;
    std::filesystem::path output_dir;  // empty: no artifacts written

    void validate() const;  // throws ConfigError
};

RunConfig load_run_config(const std::filesystem::path& path);

// Stable per-name seed derivation so adding or removing names does not
// perturb the other names' experiments.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& name);

struct ExperimentArtifacts {
    ExperimentReport report;
    std::vector<TrialRecord> trials;
    std::vector<Resolution> resolutions;  // aligned with trials
    std::vector<CensoredPost> censored;   // all names, ground truth included
};

ExperimentArtifacts run_experiment(const RunConfig& config);
ExperimentArtifacts run_experiment(const RunConfig& config, const Corpus& corpus);

// Atomic write-temp-then-rename file emission of report.csv, report.json,
// trials.jsonl, censored.jsonl, answers.jsonl, and manifest.json.
void write_artifacts(const ExperimentArtifacts& artifacts, const RunConfig& config);

RecognizerConfig make_recognizer(const RunConfig& config);

}  // namespace decensor
