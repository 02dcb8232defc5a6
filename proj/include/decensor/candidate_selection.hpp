#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decensor/corpus.hpp"
#include "decensor/entity_recognition.hpp"

namespace decensor {

struct CandidateCount {
    std::string name;  // canonical display form
    std::size_t count = 0;
};

struct CandidateSet {
    std::vector<std::string> post_scope;   // the censored posts
    std::vector<CandidateCount> counts;    // descending count, ties lexicographic
    std::vector<std::string> top_k;        // k names, true name always present
    std::size_t k = 0;
    std::string true_name;
    std::optional<std::size_t> true_name_rank;  // natural 1-based rank by frequency
    bool forced = false;  // true name inserted because it fell outside the top k

    bool in_top_k() const { return true_name_rank && *true_name_rank <= k; }
};

// Counts every person-name occurrence in the comments tied to the given posts.
std::vector<CandidateCount> extract_candidates(const Corpus& corpus,
                                               const RecognizerConfig& config,
                                               const std::vector<std::string>& post_ids);

std::vector<CandidateCount> extract_candidates(const Corpus& corpus,
                                               const AnnotationMap& annotations,
                                               const std::vector<std::string>& post_ids);

// Natural top-k with forced inclusion of the true name: when the true name
// falls outside the natural top k, it replaces the k-th entry.
CandidateSet select_top_k(std::vector<CandidateCount> counts, std::size_t k,
                          const std::string& true_name);

}  // namespace decensor
