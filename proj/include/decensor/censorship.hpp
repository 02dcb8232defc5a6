#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "decensor/corpus.hpp"
#include "decensor/snippet_index.hpp"

namespace decensor {

struct CensorPlan {
    std::string target_name;
    std::size_t max_posts = 20;
    std::vector<std::string> selected_post_ids;
    std::uint64_t rng_seed = 0;
};

struct MaskSpan {
    std::size_t start = 0;  // offsets into censored_text
    std::size_t end = 0;
    std::string original;  // surface form that was replaced, for audit / de-censoring
};

struct CensoredSnippet {
    Snippet original;  // retained for audit only
    std::string censored_text;
    std::string mask_token;
    std::vector<MaskSpan> spans;   // one per replaced occurrence, ascending
    std::size_t focal_span = 0;    // index of the occurrence the snippet was retrieved for
};

struct CensoredPost {
    std::string post_id;
    std::string target_name;  // ground truth; never serialized next to the snippets
    std::vector<CensoredSnippet> snippets;
};

// Issues mask tokens: random ASCII letters, capitalized initial, length 6-10,
// absent from the corpus vocabulary and pairwise distinct for the generator's
// lifetime. Share one generator across an experiment to keep tokens globally
// unique.
class MaskTokenGenerator {
  public:
    MaskTokenGenerator(std::uint64_t seed, const std::unordered_set<std::string>& corpus_vocab)
        : rng_(seed), vocab_(&corpus_vocab) {}

    std::string next();

  private:
    std::mt19937_64 rng_;
    const std::unordered_set<std::string>* vocab_;
    std::unordered_set<std::string> issued_;
};

// Selects up to max_posts posts that yield at least one snippet for the name.
// More candidates than max_posts: uniform sample without replacement, seeded.
// chronological_first swaps the sample for the earliest posts by created_at.
CensorPlan plan_censorship(const Index& index, const Corpus& corpus,
                           const std::string& target_name, std::size_t max_posts,
                           std::uint64_t seed, bool chronological_first = false);

// Replaces every occurrence of the target name in each snippet with that
// snippet's fresh mask token.
std::vector<CensoredPost> censor(const CensorPlan& plan, const std::vector<Snippet>& snippets,
                                 MaskTokenGenerator& tokens);

// Audit check: substituting the original surfaces back restores the snippet.
std::string decensor_text(const CensoredSnippet& snippet);

void save_censored(const std::vector<CensoredPost>& posts, const std::filesystem::path& path);
void save_answers(const std::vector<CensoredPost>& posts, const std::filesystem::path& path);

}  // namespace decensor
