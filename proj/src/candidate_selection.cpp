#include "decensor/candidate_selection.hpp"

#include <algorithm>
#include <unordered_map>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"

namespace decensor {

namespace {

struct Tally {
    std::string display;
    std::size_t count = 0;
};

std::vector<CandidateCount> finish(std::unordered_map<std::string, Tally>& tallies) {
    std::vector<CandidateCount> out;
    out.reserve(tallies.size());
    for (auto& [key, tally] : tallies) out.push_back(CandidateCount{tally.display, tally.count});
    std::sort(out.begin(), out.end(), [](const CandidateCount& a, const CandidateCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return normalize_name(a.name) < normalize_name(b.name);
    });
    return out;
}

void tally_match(std::unordered_map<std::string, Tally>& tallies, const std::string& surface) {
    std::string key = normalize_name(surface);
    auto [it, inserted] = tallies.try_emplace(key);
    if (inserted) it->second.display = squeeze_spaces(surface);
    ++it->second.count;
}

}  // namespace

std::vector<CandidateCount> extract_candidates(const Corpus& corpus,
                                               const RecognizerConfig& config,
                                               const std::vector<std::string>& post_ids) {
    if (post_ids.empty()) throw Error("extract_candidates: empty post set");
    std::unordered_map<std::string, Tally> tallies;
    for (const std::string& post_id : post_ids) {
        for (const std::string& comment_id : corpus.comments_of(post_id)) {
            const Document* comment = corpus.find(comment_id);
            for (const NameMatch& m : recognize_names(comment->text, config))
                tally_match(tallies, m.name);
        }
    }
    return finish(tallies);
}

std::vector<CandidateCount> extract_candidates(const Corpus& corpus,
                                               const AnnotationMap& annotations,
                                               const std::vector<std::string>& post_ids) {
    if (post_ids.empty()) throw Error("extract_candidates: empty post set");
    std::unordered_map<std::string, Tally> tallies;
    for (const std::string& post_id : post_ids) {
        for (const std::string& comment_id : corpus.comments_of(post_id)) {
            auto it = annotations.find(comment_id);
            if (it == annotations.end()) continue;
            for (const NameMatch& m : it->second) tally_match(tallies, m.name);
        }
    }
    return finish(tallies);
}

CandidateSet select_top_k(std::vector<CandidateCount> counts, std::size_t k,
                          const std::string& true_name) {
    if (k < 1) throw Error("select_top_k: k must be >= 1");

    const std::string true_key = normalize_name(true_name);
    std::optional<std::size_t> natural_rank;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (normalize_name(counts[i].name) == true_key) {
            natural_rank = i + 1;
            break;
        }
    }
    if (!natural_rank || counts[*natural_rank - 1].count == 0) throw FairnessViolation(true_name);

    CandidateSet set;
    set.k = k;
    set.true_name = counts[*natural_rank - 1].name;  // canonical casing from the comments
    set.true_name_rank = natural_rank;

    std::size_t take = std::min(k, counts.size());
    for (std::size_t i = 0; i < take; ++i) set.top_k.push_back(counts[i].name);
    if (*natural_rank > k) {
        // Forced inclusion keeps |top_k| at exactly k.
        set.top_k.back() = set.true_name;
        set.forced = true;
    }
    set.counts = std::move(counts);
    return set;
}

}  // namespace decensor
