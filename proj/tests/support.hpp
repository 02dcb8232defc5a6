#pragma once

// Shared fixtures and independent oracles. The oracles deliberately avoid the
// library's own tokenizer/matcher so a bug there cannot hide itself.

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "decensor/corpus.hpp"
#include "decensor/evaluation.hpp"

namespace testsupport {

inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        std::random_device rd;
        auto d = std::filesystem::temp_directory_path() /
                 ("decensor-tests-" + std::to_string(rd()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::filesystem::path scratch_file(const std::string& name) {
    static int counter = 0;
    return scratch_dir() / (std::to_string(counter++) + "-" + name);
}

// ---- independent tokenizer + phrase scanner --------------------------------

inline bool oracle_token_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

inline std::string oracle_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline std::vector<std::pair<std::size_t, std::size_t>> oracle_tokens(const std::string& s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        if (!oracle_token_char(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n) {
            if (oracle_token_char(static_cast<unsigned char>(s[j]))) {
                ++j;
            } else if (s[j] == '\'' && j > i && j + 1 < n &&
                       oracle_token_char(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
            } else {
                break;
            }
        }
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

// Case-insensitive whole-token phrase spans of `name` in `text`.
inline std::vector<std::pair<std::size_t, std::size_t>> oracle_phrase_spans(
    const std::string& text, const std::string& name) {
    std::vector<std::string> query;
    for (auto [b, e] : oracle_tokens(name)) query.push_back(oracle_lower(name.substr(b, e - b)));
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (query.empty()) return out;
    auto toks = oracle_tokens(text);
    for (std::size_t i = 0; i + query.size() <= toks.size(); ++i) {
        bool ok = true;
        for (std::size_t q = 0; q < query.size(); ++q) {
            auto [b, e] = toks[i + q];
            if (oracle_lower(text.substr(b, e - b)) != query[q]) {
                ok = false;
                break;
            }
        }
        if (ok) out.emplace_back(toks[i].first, toks[i + query.size() - 1].second);
    }
    return out;
}

struct OracleSnippet {
    std::string doc_id;
    std::size_t char_start = 0;
    std::size_t char_end = 0;
    std::size_t match_start = 0;  // absolute, into the document
    std::size_t match_end = 0;

    auto key() const { return std::tie(doc_id, char_start, char_end, match_start, match_end); }
    bool operator<(const OracleSnippet& o) const { return key() < o.key(); }
    bool operator==(const OracleSnippet& o) const { return key() == o.key(); }
};

// Window centered on the match, clipped at [0, len); dropped when < min_len.
inline bool oracle_window(std::size_t ms, std::size_t me, std::size_t len, std::size_t window,
                          std::size_t min_len, std::size_t& ws, std::size_t& we) {
    std::size_t mlen = me - ms;
    if (mlen >= window) {
        std::size_t mid = ms + mlen / 2;
        ws = mid > window / 2 ? mid - window / 2 : 0;
        we = ws + window;
    } else {
        std::size_t left = (window - mlen) / 2;
        ws = ms > left ? ms - left : 0;
        we = me + (window - mlen - left);
    }
    we = std::min(we, len);
    return we - ws >= min_len;
}

inline std::vector<OracleSnippet> oracle_snippets(const decensor::Corpus& corpus,
                                                  const std::string& name, std::size_t window,
                                                  std::size_t min_len,
                                                  bool posts_only = false) {
    std::vector<OracleSnippet> out;
    for (const decensor::Document& d : corpus.documents()) {
        if (posts_only && d.kind != decensor::DocKind::Post) continue;
        for (auto [ms, me] : oracle_phrase_spans(d.text, name)) {
            std::size_t ws = 0, we = 0;
            if (!oracle_window(ms, me, d.text.size(), window, min_len, ws, we)) continue;
            out.push_back({d.id, ws, we, ms, me});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- random corpora for property tests --------------------------------------

inline std::string random_word(std::mt19937_64& rng) {
    static const std::vector<std::string> pool = {
        "alpha", "bravo",  "Carter", "delta",   "Echo",   "fox",    "O'Brien", "trump",
        "Trump", "trumpet", "said",  "met",     "the",    "a",      "ok",      "Paul",
        "Ryan",  "crème",   "x",     "yz",      "Smith's", "no-op", "2016",    "vote"};
    return pool[rng() % pool.size()];
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_chars) {
    static const std::string seps = "  ., !?\n'";
    std::string out;
    while (out.size() < max_chars) {
        out += random_word(rng);
        out += seps[rng() % seps.size()];
        if (rng() % 7 == 0) out += seps[rng() % seps.size()];
    }
    out.resize(std::min(out.size(), max_chars));
    return out;
}

inline decensor::Corpus random_corpus(std::mt19937_64& rng, std::size_t max_docs,
                                      std::size_t max_chars) {
    std::vector<decensor::Document> docs;
    std::size_t n_posts = 1 + rng() % std::max<std::size_t>(1, max_docs / 2);
    std::size_t n = 1 + rng() % max_docs;
    for (std::size_t i = 0; i < n; ++i) {
        decensor::Document d;
        d.id = "d" + std::to_string(i);
        d.page = "page";
        d.created_at = "2016-08-01T00:00:00Z";
        d.text = random_text(rng, 1 + rng() % max_chars);
        if (i < n_posts) {
            d.kind = decensor::DocKind::Post;
        } else {
            d.kind = decensor::DocKind::Comment;
            d.parent_id = "d" + std::to_string(rng() % n_posts);
        }
        docs.push_back(std::move(d));
    }
    return decensor::Corpus(std::move(docs));
}

inline std::string random_query(std::mt19937_64& rng) {
    std::string q = random_word(rng);
    if (rng() % 2) q += " " + random_word(rng);
    return q;
}

// ---- published-figures fixture ----------------------------------------------

struct FixtureRow {
    std::string name;
    std::size_t posts;
    std::size_t n_in_top_k;
    std::size_t n_cer;      // correct AND in_top_k
    std::size_t n_correct;  // correct regardless of rank
    std::size_t n_mf;       // most-frequent baseline hits
    const char* cer;
    const char* global;
    const char* most_freq;
    const char* random;
};

// Per-row indicator counts consistent with the published two-decimal cells.
inline const std::vector<FixtureRow>& fixture_rows() {
    static const std::vector<FixtureRow> rows = {
        {"Mitt Romney", 10, 7, 2, 4, 0, "0.20", "0.40", "0.00", "0.07"},
        {"Rudy Giuliani", 18, 18, 8, 8, 4, "0.44", "0.44", "0.22", "0.10"},
        {"Bernie Sanders", 20, 18, 9, 9, 1, "0.45", "0.45", "0.05", "0.09"},
        {"Gary Johnson", 20, 20, 9, 9, 7, "0.45", "0.45", "0.35", "0.10"},
        {"Mike Pence", 20, 20, 10, 10, 6, "0.50", "0.50", "0.30", "0.10"},
        {"Rahm Emanuel", 20, 20, 15, 15, 4, "0.75", "0.75", "0.20", "0.10"},
        {"Ryan Lochte", 14, 14, 11, 11, 5, "0.79", "0.79", "0.36", "0.10"},
        {"Colin Kaepernick", 20, 18, 15, 17, 9, "0.75", "0.85", "0.45", "0.09"},
        {"Paul Ryan", 14, 14, 14, 14, 0, "1.00", "1.00", "0.00", "0.10"},
        {"Rick Scott", 15, 15, 15, 15, 4, "1.00", "1.00", "0.27", "0.10"},
    };
    return rows;
}

// Expands one row's counts into per-trial indicators. Layout: the correct
// trials come first (in-top-k ones before forced ones), then incorrect
// in-top-k, then the rest; most_freq hits are assigned from the front.
inline std::vector<decensor::TrialRecord> fixture_trials(const FixtureRow& row, std::size_t k) {
    std::vector<decensor::TrialRecord> out;
    std::size_t correct_outside = row.n_correct - row.n_cer;
    std::size_t outside = row.posts - row.n_in_top_k;
    for (std::size_t i = 0; i < row.posts; ++i) {
        decensor::TrialRecord t;
        t.name = row.name;
        t.post_id = row.name + "#" + std::to_string(i);
        t.candidate_count = k;
        if (i < row.n_cer) {
            t.correct = true;
            t.in_top_k = true;
        } else if (i < row.n_cer + correct_outside) {
            t.correct = true;
            t.in_top_k = false;
        } else if (i < row.n_cer + correct_outside + (outside - correct_outside)) {
            t.correct = false;
            t.in_top_k = false;
        } else {
            t.correct = false;
            t.in_top_k = true;
        }
        t.most_freq_hit = i < row.n_mf;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace testsupport
