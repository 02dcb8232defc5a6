#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace decensor {

enum class DocKind { Post, Comment };

struct Document {
    std::string id;
    DocKind kind = DocKind::Post;
    std::string parent_id;  // empty for posts
    std::string page;
    std::string created_at;  // RFC 3339, kept verbatim for provenance
    std::string text;
};

// Immutable after load; all linkage invariants are checked up front.
class Corpus {
  public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> docs);

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

    const Document* find(const std::string& doc_id) const;
    std::size_t index_of(const std::string& doc_id) const;  // throws UnknownDocument

    // Comment ids of a post, in document order. Empty for unknown / comment ids.
    const std::vector<std::string>& comments_of(const std::string& post_id) const;

    // Lowercased token vocabulary over every document text.
    const std::unordered_set<std::string>& vocabulary() const { return vocab_; }

  private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::vector<std::string>> comments_of_;
    std::unordered_set<std::string> vocab_;
};

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct SyntheticName {
    std::string name;
    std::vector<std::string> vocabulary;
    int post_count = 0;
    int comment_count = 0;
    double mention_rate = 1.0;
};

struct SyntheticSpec {
    std::vector<SyntheticName> names;
    std::vector<std::string> background_vocabulary;
    std::uint64_t seed = 0;
};

// Deterministic: the same spec (seed included) yields a byte-identical corpus.
Corpus generate_synthetic(const SyntheticSpec& spec);

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

}  // namespace decensor
