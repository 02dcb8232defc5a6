#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "decensor/candidate_selection.hpp"
#include "decensor/censorship.hpp"
#include "decensor/corpus.hpp"
#include "decensor/snippet_index.hpp"

namespace decensor {

// Class 0 is ANON (the true name); classes 1..k-1 are DUMBO1..DUMBOk-1 in
// candidate order.
inline constexpr int kClassAnon = 0;
inline constexpr int kClassAbstain = -1;

std::string class_label(int class_id);  // "ANON", "DUMBO1", ...

struct TrainingExample {
    int label = 0;
    std::vector<std::string> left_context;   // nearest token first
    std::vector<std::string> right_context;  // nearest token first
    std::string doc_id;
    std::string tagged_text;  // masked snippet with class tags, for the audit dump
};

struct CerHyperparameters {
    std::size_t context_tokens = 8;  // symmetric token window per side
    std::size_t epochs = 5;
    std::size_t class_example_cap = 500;
    std::size_t min_examples_per_candidate = 3;
    double abstain_margin = 0.0;  // 0 disables abstention
    bool majority_vote = false;   // default: sum snippet score vectors
    std::uint64_t seed = 0;
};

// Averaged multi-class perceptron over windowed context features.
struct CerModel {
    std::vector<std::string> class_names;  // candidate names, index = class id
    std::unordered_map<std::string, std::uint32_t> feature_ids;
    std::vector<std::vector<double>> weights;  // [class][feature]
    CerHyperparameters hparams;
    std::vector<std::size_t> examples_per_class;

    void save(const std::filesystem::path& path) const;
    static CerModel load(const std::filesystem::path& path);
};

struct CandidateSnippets {
    std::string candidate;
    int class_id = 0;
    std::vector<Snippet> snippets;
    bool insufficient = false;  // fewer than the configured minimum of examples
};

// All snippets for each candidate over the whole corpus except the censored
// posts. Candidates short of min_examples are retained but flagged.
std::vector<CandidateSnippets> fetch_training_snippets(
    const Index& index, const Corpus& corpus, const CandidateSet& candidates,
    const std::vector<std::string>& excluded_post_ids, std::size_t min_examples = 3,
    std::size_t window = kSnippetWindow, std::size_t min_len = kSnippetMinLen);

// Masks each snippet with a fresh random token and labels it by its candidate.
// Context features are drawn from the unmasked surroundings with every
// occurrence of the candidate skipped, so the mask token can never leak into
// a feature.
std::vector<TrainingExample> build_examples(const std::vector<CandidateSnippets>& per_candidate,
                                            const CandidateSet& candidates,
                                            const Corpus& corpus,
                                            const CerHyperparameters& hparams,
                                            std::uint64_t mask_seed);

CerModel train(const std::vector<TrainingExample>& examples, const CerHyperparameters& hparams,
               const std::vector<std::string>& class_names);

struct Resolution {
    std::string post_id;
    std::vector<std::vector<double>> snippet_scores;  // [snippet][class]
    std::vector<double> scores;                       // aggregated per class
    int predicted_class = kClassAbstain;
    std::string predicted_name;

    bool operator==(const Resolution&) const = default;
};

Resolution resolve(const CerModel& model, const CensoredPost& censored_post);

// Feature vector for one masked context; exposed for tests.
std::vector<std::pair<std::string, double>> context_features(
    const std::vector<std::string>& left_context, const std::vector<std::string>& right_context);

// Table-style audit dump: masked snippets with <ANON>...</ANON> /
// <DUMBOi>...</DUMBOi> spans.
void dump_examples(const std::vector<TrainingExample>& examples,
                   const std::filesystem::path& path);

}  // namespace decensor
