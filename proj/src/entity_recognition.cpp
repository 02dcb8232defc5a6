#include "decensor/entity_recognition.hpp"

#include <algorithm>
#include <fstream>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

namespace {

std::vector<std::string> tokens_lower(const std::string& s) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(s))
        out.push_back(to_lower(std::string_view(s).substr(t.begin, t.length())));
    return out;
}

}  // namespace

RecognizerConfig::RecognizerConfig(std::vector<std::string> gazetteer,
                                   std::vector<std::string> denylist,
                                   std::vector<std::string> title_markers, bool use_heuristic)
    : use_heuristic_(use_heuristic) {
    for (const std::string& d : denylist) denylist_.insert(normalize_name(d));
    for (const std::string& t : title_markers) {
        std::string lower = to_lower(t);
        // Stored without the trailing dot; matching strips it from tokens too.
        if (!lower.empty() && lower.back() == '.') lower.pop_back();
        title_markers_.insert(lower);
    }
    for (const std::string& g : gazetteer) {
        if (denylist_.contains(normalize_name(g)))
            throw ConfigError("gazetteer entry also denylisted: " + g);
        std::vector<std::string> toks = tokens_lower(g);
        if (toks.empty()) continue;
        gazetteer_by_head_[toks.front()].push_back(std::move(toks));
    }
    // Longest-match-wins is resolved by trying longer entries first.
    for (auto& [head, entries] : gazetteer_by_head_) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.size() > b.size(); });
    }
}

std::vector<std::string> RecognizerConfig::read_list_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open list file: " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string entry = squeeze_spaces(line);
        if (!entry.empty()) out.push_back(std::move(entry));
    }
    return out;
}

bool RecognizerConfig::denylisted(const std::string& normalized) const {
    return denylist_.contains(normalized);
}

bool RecognizerConfig::is_title_marker(const std::string& lower_token) const {
    return title_markers_.contains(lower_token);
}

std::vector<NameMatch> recognize_names(const std::string& text, const RecognizerConfig& config) {
    const std::vector<Token> toks = tokenize(text);
    std::vector<std::string> lower(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i)
        lower[i] = to_lower(std::string_view(text).substr(toks[i].begin, toks[i].length()));

    // A token is sentence-initial when nothing but sentence punctuation and
    // whitespace separates it from the previous token (or the text start).
    std::vector<bool> sentence_initial(toks.size(), false);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i == 0) {
            sentence_initial[i] = true;
            continue;
        }
        std::string_view gap =
            std::string_view(text).substr(toks[i - 1].end, toks[i].begin - toks[i - 1].end);
        sentence_initial[i] = gap.find_first_of(".!?\n") != std::string_view::npos;
    }

    std::vector<bool> consumed(toks.size(), false);
    std::vector<NameMatch> out;

    auto surface = [&](std::size_t first, std::size_t last) {
        return text.substr(toks[first].begin, toks[last].end - toks[first].begin);
    };

    // Gazetteer pass, longest match wins on overlap.
    for (std::size_t i = 0; i < toks.size(); ++i) {
        auto it = config.gazetteer_by_head().find(lower[i]);
        if (it == config.gazetteer_by_head().end()) continue;
        for (const std::vector<std::string>& entry : it->second) {
            if (i + entry.size() > toks.size()) continue;
            bool match = true;
            for (std::size_t q = 1; q < entry.size(); ++q) {
                if (lower[i + q] != entry[q]) {
                    match = false;
                    break;
                }
            }
            if (!match) continue;
            out.push_back(NameMatch{surface(i, i + entry.size() - 1), toks[i].begin});
            for (std::size_t q = 0; q < entry.size(); ++q) consumed[i + q] = true;
            i += entry.size() - 1;
            break;
        }
    }

    if (config.use_heuristic()) {
        auto usable = [&](std::size_t i) {
            std::string_view word(text.data() + toks[i].begin, toks[i].length());
            return !consumed[i] && starts_with_upper(word) && !config.is_title_marker(lower[i]);
        };
        std::size_t i = 0;
        while (i < toks.size()) {
            bool titled = i > 0 && config.is_title_marker(lower[i - 1]);
            // Sentence-initial capitalized words carry no signal on their own;
            // skip them unless a title marker vouches for the run.
            if (!usable(i) || (sentence_initial[i] && !titled)) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < toks.size() && usable(j + 1) && !sentence_initial[j + 1]) ++j;
            std::size_t len = j - i + 1;
            bool length_ok = titled ? len <= 3 : (len >= 2 && len <= 3);
            if (length_ok) {
                std::string phrase = surface(i, j);
                bool blocked = config.denylisted(normalize_name(phrase));
                for (std::size_t q = i; q <= j && !blocked; ++q)
                    blocked = config.denylisted(lower[q]);
                if (!blocked) out.push_back(NameMatch{std::move(phrase), toks[i].begin});
            }
            i = j + 1;
        }
    }

    std::sort(out.begin(), out.end(),
              [](const NameMatch& a, const NameMatch& b) { return a.offset < b.offset; });
    return out;
}

NameCensus census(const Corpus& corpus, const RecognizerConfig& config,
                  std::size_t min_occurrences, const DocFilter& scope) {
    if (min_occurrences < 1) throw Error("census: min_occurrences must be >= 1");

    struct Tally {
        std::string display;
        std::size_t count = 0;
        std::size_t first_seen = 0;
    };
    std::unordered_map<std::string, Tally> tallies;
    std::size_t order = 0;

    for (const Document& doc : corpus.documents()) {
        if (!scope(doc)) continue;
        for (const NameMatch& m : recognize_names(doc.text, config)) {
            std::string key = normalize_name(m.name);
            auto [it, inserted] = tallies.try_emplace(key);
            if (inserted) {
                it->second.display = squeeze_spaces(m.name);
                it->second.first_seen = order++;
            }
            ++it->second.count;
        }
    }

    NameCensus result;
    result.min_occurrences = min_occurrences;
    for (auto& [key, tally] : tallies) {
        if (tally.count >= min_occurrences)
            result.counts.push_back(NameCount{tally.display, tally.count});
    }
    std::sort(result.counts.begin(), result.counts.end(), [](const NameCount& a, const NameCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return normalize_name(a.name) < normalize_name(b.name);
    });
    return result;
}

AnnotationMap import_annotations(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotations file: " + path.string());
    AnnotationMap out;
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
        std::string doc_id, name;
        std::size_t offset = 0;
        try {
            doc_id = j.at("doc_id").get<std::string>();
            name = j.at("name").get<std::string>();
            offset = j.at("offset").get<std::size_t>();
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        }
        if (corpus.find(doc_id) == nullptr) throw UnknownDocument(doc_id);
        out[doc_id].push_back(NameMatch{std::move(name), offset});
    }
    return out;
}

void export_annotations(const AnnotationMap& annotations, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write annotations file: " + path.string());
    std::vector<std::string> ids;
    ids.reserve(annotations.size());
    for (const auto& [id, _] : annotations) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
        for (const NameMatch& m : annotations.at(id)) {
            json j;
            j["doc_id"] = id;
            j["name"] = m.name;
            j["offset"] = m.offset;
            out << j.dump() << '\n';
        }
    }
}

}  // namespace decensor
