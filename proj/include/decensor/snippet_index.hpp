#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "decensor/corpus.hpp"
#include "decensor/text.hpp"

namespace decensor {

inline constexpr std::size_t kSnippetWindow = 200;
inline constexpr std::size_t kSnippetMinLen = 50;

// Window of text around one whole-token phrase match.
struct Snippet {
    std::string doc_id;
    DocKind kind = DocKind::Post;
    std::size_t char_start = 0;  // offsets into the source document text
    std::size_t char_end = 0;
    std::string window_text;
    std::size_t match_start = 0;  // offsets of the match within window_text
    std::size_t match_end = 0;
};

struct Posting {
    std::uint32_t doc = 0;          // index into Corpus::documents()
    std::uint32_t token_index = 0;  // position in the document's token stream
    std::uint32_t char_offset = 0;
};

// Inverted index over lowercased tokens. Immutable after build.
class Index {
  public:
    static Index build(const Corpus& corpus);

    std::size_t doc_count() const { return doc_tokens_.size(); }
    const std::vector<Posting>& postings(const std::string& lower_token) const;
    const std::vector<Token>& tokens_of(std::size_t doc_index) const { return doc_tokens_[doc_index]; }

  private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::vector<Token>> doc_tokens_;
};

using DocFilter = std::function<bool(const Document&)>;

DocFilter any_document();
DocFilter posts_only();
DocFilter comments_only();
DocFilter exclude_docs(std::vector<std::string> doc_ids);
DocFilter both(DocFilter a, DocFilter b);

// One snippet per case-insensitive whole-token occurrence of `name` in
// documents passing `scope`. The window is centered on the match and clipped
// at document boundaries; clipped windows shorter than min_len are dropped.
std::vector<Snippet> find_snippets(const Index& index, const Corpus& corpus,
                                   const std::string& name, std::size_t window = kSnippetWindow,
                                   std::size_t min_len = kSnippetMinLen,
                                   const DocFilter& scope = any_document());

// Whole-token phrase occurrences of `name` in a single text, as (start, end)
// character spans. Shared by censoring and the recognizer; find_snippets
// agrees with this definition occurrence by occurrence.
std::vector<std::pair<std::size_t, std::size_t>> phrase_occurrences(std::string_view text,
                                                                    const std::string& name);

}  // namespace decensor
