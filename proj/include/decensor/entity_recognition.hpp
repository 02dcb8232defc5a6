#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "decensor/corpus.hpp"
#include "decensor/snippet_index.hpp"

namespace decensor {

struct NameMatch {
    std::string name;    // surface form as it appears in the text
    std::size_t offset;  // character offset of the occurrence
};

// Gazetteer + capitalized-run heuristic; a light stand-in for a statistical
// person NER. Denylist and gazetteer must be disjoint after normalization.
class RecognizerConfig {
  public:
    RecognizerConfig() = default;
    RecognizerConfig(std::vector<std::string> gazetteer, std::vector<std::string> denylist,
                     std::vector<std::string> title_markers = {}, bool use_heuristic = false);

    static std::vector<std::string> read_list_file(const std::filesystem::path& path);

    bool use_heuristic() const { return use_heuristic_; }
    bool denylisted(const std::string& normalized) const;
    bool is_title_marker(const std::string& lower_token) const;

    // Gazetteer entries grouped by normalized first token.
    const std::unordered_map<std::string, std::vector<std::vector<std::string>>>& gazetteer_by_head()
        const {
        return gazetteer_by_head_;
    }

  private:
    std::unordered_map<std::string, std::vector<std::vector<std::string>>> gazetteer_by_head_;
    std::unordered_set<std::string> denylist_;
    std::unordered_set<std::string> title_markers_;
    bool use_heuristic_ = false;
};

std::vector<NameMatch> recognize_names(const std::string& text, const RecognizerConfig& config);

struct NameCount {
    std::string name;  // canonical form: first-seen casing, single spaces
    std::size_t count = 0;
};

struct NameCensus {
    std::vector<NameCount> counts;  // descending count, ties lexicographic
    std::size_t min_occurrences = 1;
};

NameCensus census(const Corpus& corpus, const RecognizerConfig& config,
                  std::size_t min_occurrences, const DocFilter& scope = any_document());

// Per-document annotations, usable wherever recognize_names output is.
using AnnotationMap = std::unordered_map<std::string, std::vector<NameMatch>>;

AnnotationMap import_annotations(const std::filesystem::path& path, const Corpus& corpus);
void export_annotations(const AnnotationMap& annotations, const std::filesystem::path& path);

}  // namespace decensor
