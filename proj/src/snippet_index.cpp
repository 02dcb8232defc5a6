#include "decensor/snippet_index.hpp"

#include <algorithm>
#include <memory>
#include <unordered_set>

#include "decensor/errors.hpp"

namespace decensor {

namespace {

const std::vector<Posting> kNoPostings;

std::vector<std::string> query_tokens(const std::string& name) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(name))
        out.push_back(to_lower(std::string_view(name).substr(t.begin, t.length())));
    return out;
}

std::string lower_token(std::string_view text, const Token& t) {
    return to_lower(text.substr(t.begin, t.length()));
}

// Centered window, clipped at [0, len). Returns false when the clipped window
// falls below min_len.
bool window_around(std::size_t match_start, std::size_t match_end, std::size_t len,
                   std::size_t window, std::size_t min_len, std::size_t& out_start,
                   std::size_t& out_end) {
    std::size_t match_len = match_end - match_start;
    if (match_len >= window) {
        // Degenerate: the match alone fills the window; keep its center.
        std::size_t mid = match_start + match_len / 2;
        out_start = mid > window / 2 ? mid - window / 2 : 0;
        out_end = out_start + window;
    } else {
        std::size_t extra = window - match_len;
        std::size_t left = extra / 2;
        out_start = match_start > left ? match_start - left : 0;
        out_end = std::min(len, match_end + (extra - left));
    }
    out_end = std::min(out_end, len);
    return out_end - out_start >= min_len;
}

}  // namespace

Index Index::build(const Corpus& corpus) {
    Index idx;
    idx.doc_tokens_.resize(corpus.size());
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        const std::string& text = corpus.documents()[d].text;
        idx.doc_tokens_[d] = tokenize(text);
        const auto& toks = idx.doc_tokens_[d];
        for (std::size_t t = 0; t < toks.size(); ++t) {
            idx.postings_[lower_token(text, toks[t])].push_back(
                Posting{static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(t),
                        static_cast<std::uint32_t>(toks[t].begin)});
        }
    }
    // Postings end up grouped by insertion order; re-sort by doc_id then offset
    // so the layout does not depend on document order in the input file.
    for (auto& [token, list] : idx.postings_) {
        std::sort(list.begin(), list.end(), [&corpus](const Posting& a, const Posting& b) {
            const std::string& ida = corpus.documents()[a.doc].id;
            const std::string& idb = corpus.documents()[b.doc].id;
            if (ida != idb) return ida < idb;
            return a.char_offset < b.char_offset;
        });
    }
    return idx;
}

const std::vector<Posting>& Index::postings(const std::string& lower_token) const {
    auto it = postings_.find(lower_token);
    return it == postings_.end() ? kNoPostings : it->second;
}

DocFilter any_document() {
    return [](const Document&) { return true; };
}

DocFilter posts_only() {
    return [](const Document& d) { return d.kind == DocKind::Post; };
}

DocFilter comments_only() {
    return [](const Document& d) { return d.kind == DocKind::Comment; };
}

DocFilter exclude_docs(std::vector<std::string> doc_ids) {
    auto excluded = std::make_shared<std::unordered_set<std::string>>(
        doc_ids.begin(), doc_ids.end());
    return [excluded](const Document& d) { return !excluded->contains(d.id); };
}

DocFilter both(DocFilter a, DocFilter b) {
    return [a = std::move(a), b = std::move(b)](const Document& d) { return a(d) && b(d); };
}

std::vector<Snippet> find_snippets(const Index& index, const Corpus& corpus,
                                   const std::string& name, std::size_t window,
                                   std::size_t min_len, const DocFilter& scope) {
    if (name.empty()) throw Error("find_snippets: empty name");
    if (window < min_len) throw Error("find_snippets: window smaller than min_len");

    const std::vector<std::string> query = query_tokens(name);
    std::vector<Snippet> out;
    if (query.empty()) return out;

    for (const Posting& p : index.postings(query.front())) {
        const Document& doc = corpus.documents()[p.doc];
        if (!scope(doc)) continue;
        const auto& toks = index.tokens_of(p.doc);
        if (p.token_index + query.size() > toks.size()) continue;
        bool match = true;
        for (std::size_t q = 1; q < query.size(); ++q) {
            if (lower_token(doc.text, toks[p.token_index + q]) != query[q]) {
                match = false;
                break;
            }
        }
        if (!match) continue;

        std::size_t match_start = toks[p.token_index].begin;
        std::size_t match_end = toks[p.token_index + query.size() - 1].end;
        std::size_t ws = 0, we = 0;
        if (!window_around(match_start, match_end, doc.text.size(), window, min_len, ws, we))
            continue;

        Snippet s;
        s.doc_id = doc.id;
        s.kind = doc.kind;
        s.char_start = ws;
        s.char_end = we;
        s.window_text = doc.text.substr(ws, we - ws);
        s.match_start = match_start - ws;
        s.match_end = std::min(match_end, we) - ws;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> phrase_occurrences(std::string_view text,
                                                                    const std::string& name) {
    const std::vector<std::string> query = query_tokens(name);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (query.empty()) return out;
    const std::vector<Token> toks = tokenize(text);
    for (std::size_t i = 0; i + query.size() <= toks.size(); ++i) {
        bool match = true;
        for (std::size_t q = 0; q < query.size(); ++q) {
            if (to_lower(text.substr(toks[i + q].begin, toks[i + q].length())) != query[q]) {
                match = false;
                break;
            }
        }
        if (match) out.emplace_back(toks[i].begin, toks[i + query.size() - 1].end);
    }
    return out;
}

}  // namespace decensor
