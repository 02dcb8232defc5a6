#include "decensor/censorship.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

std::string MaskTokenGenerator::next() {
    for (;;) {
        std::size_t len = 6 + rng_() % 5;
        std::string token;
        token.reserve(len);
        token.push_back(static_cast<char>('A' + rng_() % 26));
        for (std::size_t i = 1; i < len; ++i)
            token.push_back(static_cast<char>('a' + rng_() % 26));
        std::string lower = to_lower(token);
        if (vocab_->contains(lower)) continue;
        if (!issued_.insert(lower).second) continue;
        return token;
    }
}

CensorPlan plan_censorship(const Index& index, const Corpus& corpus,
                           const std::string& target_name, std::size_t max_posts,
                           std::uint64_t seed, bool chronological_first) {
    std::vector<std::string> candidates;
    for (const Snippet& s : find_snippets(index, corpus, target_name, kSnippetWindow,
                                          kSnippetMinLen, posts_only())) {
        if (candidates.empty() || candidates.back() != s.doc_id) candidates.push_back(s.doc_id);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) throw NameNotFound(target_name);

    CensorPlan plan;
    plan.target_name = target_name;
    plan.max_posts = max_posts;
    plan.rng_seed = seed;

    if (candidates.size() <= max_posts) {
        plan.selected_post_ids = std::move(candidates);
    } else if (chronological_first) {
        std::stable_sort(candidates.begin(), candidates.end(),
                         [&corpus](const std::string& a, const std::string& b) {
                             return corpus.find(a)->created_at < corpus.find(b)->created_at;
                         });
        candidates.resize(max_posts);
        std::sort(candidates.begin(), candidates.end());
        plan.selected_post_ids = std::move(candidates);
    } else {
        std::mt19937_64 rng(seed);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(max_posts);
        std::sort(candidates.begin(), candidates.end());
        plan.selected_post_ids = std::move(candidates);
    }
    return plan;
}

std::vector<CensoredPost> censor(const CensorPlan& plan, const std::vector<Snippet>& snippets,
                                 MaskTokenGenerator& tokens) {
    std::unordered_set<std::string> selected(plan.selected_post_ids.begin(),
                                             plan.selected_post_ids.end());
    std::map<std::string, CensoredPost> by_post;

    for (const Snippet& s : snippets) {
        if (!selected.contains(s.doc_id))
            throw Error("censor: snippet from unselected post " + s.doc_id);

        CensoredSnippet cs;
        cs.original = s;
        cs.mask_token = tokens.next();

        // All occurrences within the window share the snippet's token.
        auto occurrences = phrase_occurrences(cs.original.window_text, plan.target_name);
        std::size_t cursor = 0;
        for (auto [start, end] : occurrences) {
            if (start == s.match_start) cs.focal_span = cs.spans.size();
            cs.censored_text += s.window_text.substr(cursor, start - cursor);
            MaskSpan span;
            span.start = cs.censored_text.size();
            span.end = span.start + cs.mask_token.size();
            span.original = s.window_text.substr(start, end - start);
            cs.censored_text += cs.mask_token;
            cs.spans.push_back(std::move(span));
            cursor = end;
        }
        cs.censored_text += s.window_text.substr(cursor);

        CensoredPost& post = by_post[s.doc_id];
        post.post_id = s.doc_id;
        post.target_name = plan.target_name;
        post.snippets.push_back(std::move(cs));
    }

    std::vector<CensoredPost> out;
    out.reserve(by_post.size());
    for (auto& [_, post] : by_post) out.push_back(std::move(post));
    return out;
}

std::string decensor_text(const CensoredSnippet& snippet) {
    std::string out;
    std::size_t cursor = 0;
    for (const MaskSpan& span : snippet.spans) {
        out += snippet.censored_text.substr(cursor, span.start - cursor);
        out += span.original;
        cursor = span.end;
    }
    out += snippet.censored_text.substr(cursor);
    return out;
}

void save_censored(const std::vector<CensoredPost>& posts, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write censored file: " + path.string());
    for (const CensoredPost& p : posts) {
        for (const CensoredSnippet& s : p.snippets) {
            json j;
            j["post_id"] = p.post_id;
            j["mask_token"] = s.mask_token;
            j["censored_text"] = s.censored_text;
            j["char_start"] = s.original.char_start;
            j["char_end"] = s.original.char_end;
            out << j.dump() << '\n';
        }
    }
}

void save_answers(const std::vector<CensoredPost>& posts, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write answers file: " + path.string());
    for (const CensoredPost& p : posts) {
        json j;
        j["post_id"] = p.post_id;
        j["target_name"] = p.target_name;
        out << j.dump() << '\n';
    }
}

}  // namespace decensor
