#include "decensor/text.hpp"

#include <cctype>

namespace decensor {

bool is_token_char(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_token_char(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < n) {
            unsigned char c = static_cast<unsigned char>(text[i]);
            if (is_token_char(c)) {
                ++i;
            } else if (c == '\'' && i + 1 < n && i > begin &&
                       is_token_char(static_cast<unsigned char>(text[i + 1]))) {
                i += 2;
            } else {
                break;
            }
        }
        out.push_back(Token{begin, i});
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return out;
}

std::string squeeze_spaces(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool in_space = true;  // leading whitespace dropped
    for (unsigned char c : name) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::string normalize_name(std::string_view name) {
    return to_lower(squeeze_spaces(name));
}

bool starts_with_upper(std::string_view word) {
    return !word.empty() && std::isupper(static_cast<unsigned char>(word.front())) != 0;
}

}  // namespace decensor
