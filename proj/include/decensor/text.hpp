#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace decensor {

// Half-open character span of a token inside its source string.
struct Token {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
};

// A token character is alphanumeric ASCII or any non-ASCII byte (so UTF-8
// sequences stay inside one token).
bool is_token_char(unsigned char c);

// Splits on whitespace and punctuation. An ASCII apostrophe with token
// characters on both sides does not break the token ("O'Brien" is one token).
std::vector<Token> tokenize(std::string_view text);

// ASCII lowercasing; bytes >= 0x80 pass through unchanged.
std::string to_lower(std::string_view s);

// Lowercases and collapses internal whitespace runs to single spaces.
std::string normalize_name(std::string_view name);

// Collapses whitespace runs but keeps the original casing.
std::string squeeze_spaces(std::string_view name);

bool starts_with_upper(std::string_view word);

}  // namespace decensor
