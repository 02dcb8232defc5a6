#include "decensor/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

namespace {

const std::vector<std::string> kNoComments;

// Stable in-project randomness helpers so generated corpora do not depend on
// the standard library's distribution algorithms.
double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t next_index(std::mt19937_64& rng, std::size_t bound) {
    return static_cast<std::size_t>(next_double(rng) * static_cast<double>(bound)) % bound;
}

std::string timestamp_at(std::uint64_t seconds) {
    unsigned day = static_cast<unsigned>(seconds / 86400);
    unsigned rem = static_cast<unsigned>(seconds % 86400);
    char buf[32];
    std::snprintf(buf, sizeof buf, "2016-08-%02uT%02u:%02u:%02uZ", 1 + day % 28, rem / 3600,
                  (rem / 60) % 60, rem % 60);
    return buf;
}

std::string sentence_with_name(std::mt19937_64& rng, const std::string& name,
                               const std::vector<std::string>& vocab,
                               const std::vector<std::string>& background, std::size_t n_words) {
    std::vector<std::string> words;
    words.reserve(n_words + 1);
    for (std::size_t w = 0; w < n_words; ++w) {
        bool from_vocab = background.empty() || next_double(rng) < 0.55;
        const auto& pool = from_vocab && !vocab.empty() ? vocab : background;
        words.push_back(pool[next_index(rng, pool.size())]);
    }
    if (!name.empty()) {
        std::size_t at = next_index(rng, words.size() + 1);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), name);
    }
    std::string out;
    for (std::size_t w = 0; w < words.size(); ++w) {
        if (w) out.push_back(' ');
        out += words[w];
    }
    out.push_back('.');
    return out;
}

}  // namespace

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const Document& d = docs_[i];
        if (!by_id_.emplace(d.id, i).second) throw DuplicateId(d.id);
    }
    for (const Document& d : docs_) {
        if (d.kind == DocKind::Comment) {
            auto it = by_id_.find(d.parent_id);
            if (it == by_id_.end() || docs_[it->second].kind != DocKind::Post)
                throw DanglingParent(d.id);
            comments_of_[d.parent_id].push_back(d.id);
        }
        for (const Token& t : tokenize(d.text))
            vocab_.insert(to_lower(std::string_view(d.text).substr(t.begin, t.length())));
    }
}

const Document* Corpus::find(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::size_t Corpus::index_of(const std::string& doc_id) const {
    auto it = by_id_.find(doc_id);
    if (it == by_id_.end()) throw UnknownDocument(doc_id);
    return it->second;
}

const std::vector<std::string>& Corpus::comments_of(const std::string& post_id) const {
    auto it = comments_of_.find(post_id);
    return it == comments_of_.end() ? kNoComments : it->second;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path.string());

    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        }
        if (!j.is_object()) throw ParseError("expected a JSON object", line_no);
        Document d;
        try {
            d.id = j.at("id").get<std::string>();
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "post") {
                d.kind = DocKind::Post;
            } else if (kind == "comment") {
                d.kind = DocKind::Comment;
            } else {
                throw ParseError("kind must be \"post\" or \"comment\"", line_no);
            }
            d.page = j.at("page").get<std::string>();
            d.created_at = j.at("created_at").get<std::string>();
            d.text = j.at("text").get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        }
        if (d.id.empty()) throw ParseError("empty document id", line_no);
        if (d.kind == DocKind::Comment) {
            if (!j.contains("parent_id") || !j["parent_id"].is_string())
                throw ParseError("comment without parent_id: " + d.id, line_no);
            d.parent_id = j["parent_id"].get<std::string>();
        } else if (j.contains("parent_id")) {
            throw ParseError("post must not carry parent_id: " + d.id, line_no);
        }
        docs.push_back(std::move(d));
    }
    return Corpus(std::move(docs));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write corpus file: " + path.string());
    for (const Document& d : corpus.documents()) {
        json j;
        j["id"] = d.id;
        j["kind"] = d.kind == DocKind::Post ? "post" : "comment";
        if (d.kind == DocKind::Comment) j["parent_id"] = d.parent_id;
        j["page"] = d.page;
        j["created_at"] = d.created_at;
        j["text"] = d.text;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
    if (spec.names.empty()) throw InvalidSpec("names: must not be empty");
    for (const SyntheticName& n : spec.names) {
        if (n.name.empty()) throw InvalidSpec("names: empty name string");
        if (n.post_count < 0) throw InvalidSpec(n.name + ": post_count must be >= 0");
        if (n.comment_count < 0) throw InvalidSpec(n.name + ": comment_count must be >= 0");
        if (n.mention_rate < 0.0 || n.mention_rate > 1.0)
            throw InvalidSpec(n.name + ": mention_rate must be in [0,1]");
        if (n.vocabulary.empty() && spec.background_vocabulary.empty())
            throw InvalidSpec(n.name + ": no vocabulary and no background vocabulary");
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<Document> docs;
    std::uint64_t clock = 0;

    for (std::size_t i = 0; i < spec.names.size(); ++i) {
        const SyntheticName& ns = spec.names[i];
        for (int p = 0; p < ns.post_count; ++p) {
            Document post;
            post.id = "p" + std::to_string(i) + "_" + std::to_string(p);
            post.kind = DocKind::Post;
            post.page = "synthetic";
            post.created_at = timestamp_at(clock++);
            post.text = sentence_with_name(rng, ns.name, ns.vocabulary,
                                           spec.background_vocabulary, 14 + next_index(rng, 9));
            docs.push_back(std::move(post));

            for (int c = 0; c < ns.comment_count; ++c) {
                // With probability mention_rate the comment talks about the
                // post's subject, otherwise about a random other planted name.
                const SyntheticName* about = nullptr;
                if (next_double(rng) < ns.mention_rate) {
                    about = &ns;
                } else if (spec.names.size() > 1) {
                    std::size_t other = next_index(rng, spec.names.size() - 1);
                    if (other >= i) ++other;
                    about = &spec.names[other];
                }
                Document comment;
                comment.id = "c" + std::to_string(i) + "_" + std::to_string(p) + "_" +
                             std::to_string(c);
                comment.kind = DocKind::Comment;
                comment.parent_id = "p" + std::to_string(i) + "_" + std::to_string(p);
                comment.page = "synthetic";
                comment.created_at = timestamp_at(clock++);
                comment.text = sentence_with_name(
                    rng, about ? about->name : std::string(),
                    about ? about->vocabulary : spec.background_vocabulary,
                    spec.background_vocabulary, 10 + next_index(rng, 7));
                docs.push_back(std::move(comment));
            }
        }
    }
    return Corpus(std::move(docs));
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synthetic spec: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    SyntheticSpec spec;
    try {
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.background_vocabulary = j.value("background", std::vector<std::string>{});
        for (const json& n : j.at("names")) {
            SyntheticName name;
            name.name = n.at("name").get<std::string>();
            name.vocabulary = n.value("vocabulary", std::vector<std::string>{});
            name.post_count = n.value("post_count", 0);
            name.comment_count = n.value("comment_count", 0);
            name.mention_rate = n.value("mention_rate", 1.0);
            spec.names.push_back(std::move(name));
        }
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    return spec;
}

}  // namespace decensor
