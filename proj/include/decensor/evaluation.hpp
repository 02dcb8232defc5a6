#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "decensor/candidate_selection.hpp"
#include "decensor/cer.hpp"

namespace decensor {

struct TrialRecord {
    std::string name;
    std::string post_id;
    bool correct = false;        // resolution predicted ANON
    bool in_top_k = false;       // true name naturally among the k most frequent
    bool most_freq_hit = false;  // rank-1 natural candidate equals the true name
    std::size_t candidate_count = 0;  // = k
};

struct NameResult {
    std::string name;
    std::size_t posts = 0;
    double cer_accuracy = 0.0;       // mean(correct AND in_top_k)
    double global_accuracy = 0.0;    // mean(correct)
    double most_freq_accuracy = 0.0; // mean(most_freq_hit)
    double random_accuracy = 0.0;    // mean(in_top_k) / k
};

struct AggregateRow {
    std::size_t trials = 0;
    double cer_accuracy = 0.0;
    double global_accuracy = 0.0;
    double most_freq_accuracy = 0.0;
    double random_accuracy = 0.0;
};

struct SkippedName {
    std::string name;
    std::string reason;
};

struct ExperimentReport {
    std::size_t k = 0;
    std::size_t nocc_min = 0;
    std::uint64_t seed = 0;
    std::string scope_mode;  // "pooled" or "per_post"

    std::vector<NameResult> per_name;
    AggregateRow flat;   // every trial weighted equally
    AggregateRow mu;     // every name weighted equally (trials field = name count)
    std::size_t total_posts = 0;
    std::size_t total_names = 0;
    std::vector<SkippedName> skipped;
};

// answers: post_id -> true name.
std::vector<TrialRecord> score_trials(const std::vector<Resolution>& resolutions,
                                      const CandidateSet& candidates,
                                      const std::unordered_map<std::string, std::string>& answers);

ExperimentReport aggregate(const std::vector<TrialRecord>& trials, std::size_t k);

// First baseline: predict the rank-1 natural candidate.
std::string baseline_most_frequent(const CandidateSet& candidates);

// Second baseline, closed form: 1/k when the true name is naturally in the
// top k, 0 otherwise.
double baseline_random(const CandidateSet& candidates, std::size_t k);

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport read_report_json(const std::filesystem::path& path);

void save_trials(const std::vector<TrialRecord>& trials, const std::filesystem::path& path);
std::vector<TrialRecord> load_trials(const std::filesystem::path& path);

// Bar-chart-ready grid: one JSON record per (k, nocc) setting with the four
// series, flat and mu-averaged.
void write_chart_summary(const std::vector<ExperimentReport>& grid,
                         const std::filesystem::path& path);

// Presentation rounding; all internal arithmetic stays in double precision.
std::string format2(double value);

}  // namespace decensor
