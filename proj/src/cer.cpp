#include "decensor/cer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

namespace {

const char* bucket(std::size_t distance) {
    if (distance == 1) return "a";  // adjacent
    if (distance <= 3) return "n";  // near
    return "f";                     // far
}

// Left/right token contexts around one span of `spans`, nearest token first,
// lowercased. Tokens overlapping any span are skipped, so mask tokens (and
// further occurrences of the masked name) never reach the features.
void contexts_around(std::string_view text,
                     const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                     std::size_t focal, std::size_t context_tokens,
                     std::vector<std::string>& left, std::vector<std::string>& right) {
    auto in_any_span = [&spans](const Token& t) {
        for (auto [s, e] : spans)
            if (t.begin < e && t.end > s) return true;
        return false;
    };
    const auto [focal_start, focal_end] = spans[focal];
    for (const Token& t : tokenize(text)) {
        if (in_any_span(t)) continue;
        std::string word = to_lower(text.substr(t.begin, t.length()));
        if (t.end <= focal_start) {
            left.push_back(std::move(word));  // reversed below
        } else if (t.begin >= focal_end && right.size() < context_tokens) {
            right.push_back(std::move(word));
        }
    }
    std::reverse(left.begin(), left.end());
    if (left.size() > context_tokens) left.resize(context_tokens);
}

struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
};

FeatureVector intern_features(const std::vector<std::pair<std::string, double>>& features,
                              std::unordered_map<std::string, std::uint32_t>& ids) {
    FeatureVector fv;
    for (const auto& [name, value] : features) {
        auto it = ids.find(name);
        if (it == ids.end()) it = ids.emplace(name, static_cast<std::uint32_t>(ids.size())).first;
        fv.entries.emplace_back(it->second, value);
    }
    return fv;
}

// Lookup only; features unseen during training are ignored.
FeatureVector lookup_features(const std::vector<std::pair<std::string, double>>& features,
                              const std::unordered_map<std::string, std::uint32_t>& ids) {
    FeatureVector fv;
    for (const auto& [name, value] : features) {
        auto it = ids.find(name);
        if (it != ids.end()) fv.entries.emplace_back(it->second, value);
    }
    return fv;
}

std::vector<double> score_features(const CerModel& model, const FeatureVector& fv) {
    std::vector<double> scores(model.class_names.size(), 0.0);
    for (auto [fid, value] : fv.entries) {
        for (std::size_t c = 0; c < scores.size(); ++c) scores[c] += model.weights[c][fid] * value;
    }
    return scores;
}

int argmax_class(const std::vector<double>& scores) {
    int best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = static_cast<int>(c);
    return best;
}

}  // namespace

std::string class_label(int class_id) {
    if (class_id == kClassAbstain) return "ABSTAIN";
    if (class_id == kClassAnon) return "ANON";
    return "DUMBO" + std::to_string(class_id);
}

std::vector<std::pair<std::string, double>> context_features(
    const std::vector<std::string>& left_context, const std::vector<std::string>& right_context) {
    std::vector<std::pair<std::string, double>> out;
    auto emit_side = [&out](const std::vector<std::string>& tokens, bool left) {
        const char* side = left ? "L" : "R";
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            out.emplace_back(std::string("u|") + side + "|" + bucket(i + 1) + "|" + tokens[i], 1.0);
        }
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
            // Bigrams in textual order; tokens are stored nearest-first, so the
            // left side reads outer token first.
            const std::string& first = left ? tokens[i + 1] : tokens[i];
            const std::string& second = left ? tokens[i] : tokens[i + 1];
            out.emplace_back(
                std::string("b|") + side + "|" + bucket(i + 1) + "|" + first + "_" + second, 1.0);
        }
    };
    emit_side(left_context, true);
    emit_side(right_context, false);
    return out;
}

std::vector<CandidateSnippets> fetch_training_snippets(
    const Index& index, const Corpus& corpus, const CandidateSet& candidates,
    const std::vector<std::string>& excluded_post_ids, std::size_t min_examples,
    std::size_t window, std::size_t min_len) {
    DocFilter scope = exclude_docs(excluded_post_ids);

    std::vector<CandidateSnippets> out;
    int next_dumbo = 1;
    for (const std::string& candidate : candidates.top_k) {
        CandidateSnippets cs;
        cs.candidate = candidate;
        bool is_true = normalize_name(candidate) == normalize_name(candidates.true_name);
        cs.class_id = is_true ? kClassAnon : next_dumbo++;
        cs.snippets = find_snippets(index, corpus, candidate, window, min_len, scope);
        cs.insufficient = cs.snippets.size() < min_examples;
        out.push_back(std::move(cs));
    }
    std::sort(out.begin(), out.end(),
              [](const CandidateSnippets& a, const CandidateSnippets& b) {
                  return a.class_id < b.class_id;
              });
    return out;
}

std::vector<TrainingExample> build_examples(const std::vector<CandidateSnippets>& per_candidate,
                                            const CandidateSet& candidates,
                                            const Corpus& corpus,
                                            const CerHyperparameters& hparams,
                                            std::uint64_t mask_seed) {
    if (per_candidate.size() != candidates.top_k.size())
        throw Error("build_examples: candidate/snippet set size mismatch");

    MaskTokenGenerator tokens(mask_seed, corpus.vocabulary());
    std::vector<TrainingExample> out;

    for (const CandidateSnippets& cand : per_candidate) {
        const std::string tag = class_label(cand.class_id);
        for (const Snippet& s : cand.snippets) {
            auto occurrences = phrase_occurrences(s.window_text, cand.candidate);
            std::size_t focal = 0;
            for (std::size_t i = 0; i < occurrences.size(); ++i)
                if (occurrences[i].first == s.match_start) focal = i;

            TrainingExample ex;
            ex.label = cand.class_id;
            ex.doc_id = s.doc_id;
            contexts_around(s.window_text, occurrences, focal, hparams.context_tokens,
                            ex.left_context, ex.right_context);

            std::string mask = tokens.next();
            std::size_t cursor = 0;
            for (std::size_t i = 0; i < occurrences.size(); ++i) {
                auto [start, end] = occurrences[i];
                ex.tagged_text += s.window_text.substr(cursor, start - cursor);
                ex.tagged_text += "<" + tag + ">" + mask + "</" + tag + ">";
                cursor = end;
            }
            ex.tagged_text += s.window_text.substr(cursor);
            out.push_back(std::move(ex));
        }
    }
    return out;
}

CerModel train(const std::vector<TrainingExample>& examples, const CerHyperparameters& hparams,
               const std::vector<std::string>& class_names) {
    if (examples.empty()) throw EmptyTrainingSet("no training examples");
    if (class_names.size() < 2) throw EmptyTrainingSet("need at least 2 classes");

    std::mt19937_64 rng(hparams.seed);

    // Seeded per-class downsampling keeps the dominant class from swamping
    // the online updates.
    std::vector<std::vector<std::size_t>> by_class(class_names.size());
    std::size_t classes_with_examples = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        int label = examples[i].label;
        if (label < 0 || static_cast<std::size_t>(label) >= class_names.size())
            throw Error("train: example label out of range");
        if (by_class[label].empty()) ++classes_with_examples;
        by_class[label].push_back(i);
    }
    if (classes_with_examples < 2)
        throw EmptyTrainingSet("fewer than 2 classes carry examples");

    std::vector<std::size_t> selected;
    for (auto& indices : by_class) {
        if (hparams.class_example_cap && indices.size() > hparams.class_example_cap) {
            std::shuffle(indices.begin(), indices.end(), rng);
            indices.resize(hparams.class_example_cap);
            std::sort(indices.begin(), indices.end());
        }
        selected.insert(selected.end(), indices.begin(), indices.end());
    }
    std::sort(selected.begin(), selected.end());

    CerModel model;
    model.class_names = class_names;
    model.hparams = hparams;
    model.examples_per_class.assign(class_names.size(), 0);

    std::vector<FeatureVector> vectors;
    vectors.reserve(selected.size());
    for (std::size_t idx : selected) {
        const TrainingExample& ex = examples[idx];
        vectors.push_back(
            intern_features(context_features(ex.left_context, ex.right_context), model.feature_ids));
        ++model.examples_per_class[ex.label];
    }

    const std::size_t n_classes = class_names.size();
    const std::size_t n_features = model.feature_ids.size();
    std::vector<std::vector<double>> w(n_classes, std::vector<double>(n_features, 0.0));
    std::vector<std::vector<double>> totals(n_classes, std::vector<double>(n_features, 0.0));
    double step = 1.0;

    std::vector<std::size_t> order(selected.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < hparams.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t pos : order) {
            const FeatureVector& fv = vectors[pos];
            int label = examples[selected[pos]].label;

            int pred = 0;
            std::vector<double> scores(n_classes, 0.0);
            for (auto [fid, value] : fv.entries)
                for (std::size_t c = 0; c < n_classes; ++c) scores[c] += w[c][fid] * value;
            pred = argmax_class(scores);

            if (pred != label) {
                for (auto [fid, value] : fv.entries) {
                    w[label][fid] += value;
                    w[pred][fid] -= value;
                    totals[label][fid] += step * value;
                    totals[pred][fid] -= step * value;
                }
            }
            step += 1.0;
        }
    }

    // Averaged weights: mean of the weight vector over all update steps.
    model.weights.assign(n_classes, std::vector<double>(n_features, 0.0));
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t f = 0; f < n_features; ++f)
            model.weights[c][f] = w[c][f] - totals[c][f] / step;

    return model;
}

Resolution resolve(const CerModel& model, const CensoredPost& censored_post) {
    if (censored_post.snippets.empty())
        throw Error("resolve: censored post has no snippets: " + censored_post.post_id);

    Resolution res;
    res.post_id = censored_post.post_id;
    res.scores.assign(model.class_names.size(), 0.0);

    for (const CensoredSnippet& snippet : censored_post.snippets) {
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        spans.reserve(snippet.spans.size());
        for (const MaskSpan& span : snippet.spans) spans.emplace_back(span.start, span.end);

        std::vector<std::string> left, right;
        contexts_around(snippet.censored_text, spans, snippet.focal_span,
                        model.hparams.context_tokens, left, right);

        FeatureVector fv = lookup_features(context_features(left, right), model.feature_ids);
        std::vector<double> scores = score_features(model, fv);
        if (model.hparams.majority_vote) {
            res.scores[argmax_class(scores)] += 1.0;
        } else {
            for (std::size_t c = 0; c < scores.size(); ++c) res.scores[c] += scores[c];
        }
        res.snippet_scores.push_back(std::move(scores));
    }

    int best = argmax_class(res.scores);
    if (model.hparams.abstain_margin > 0.0 && res.scores.size() > 1) {
        double second = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < res.scores.size(); ++c)
            if (static_cast<int>(c) != best) second = std::max(second, res.scores[c]);
        if (res.scores[best] - second < model.hparams.abstain_margin) {
            res.predicted_class = kClassAbstain;
            return res;
        }
    }
    res.predicted_class = best;
    res.predicted_name = model.class_names[best];
    return res;
}

void CerModel::save(const std::filesystem::path& path) const {
    json j;
    j["format"] = "cer-model-v1";
    j["class_names"] = class_names;
    j["examples_per_class"] = examples_per_class;
    j["hparams"] = {{"context_tokens", hparams.context_tokens},
                    {"epochs", hparams.epochs},
                    {"class_example_cap", hparams.class_example_cap},
                    {"min_examples_per_candidate", hparams.min_examples_per_candidate},
                    {"abstain_margin", hparams.abstain_margin},
                    {"majority_vote", hparams.majority_vote},
                    {"seed", hparams.seed}};
    json features = json::object();
    for (const auto& [name, id] : feature_ids) features[name] = id;
    j["feature_ids"] = std::move(features);
    j["weights"] = weights;

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << j.dump();
}

CerModel CerModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    if (j.value("format", "") != "cer-model-v1") throw ParseError("unknown model format");

    CerModel model;
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.examples_per_class = j.at("examples_per_class").get<std::vector<std::size_t>>();
    const json& h = j.at("hparams");
    model.hparams.context_tokens = h.at("context_tokens").get<std::size_t>();
    model.hparams.epochs = h.at("epochs").get<std::size_t>();
    model.hparams.class_example_cap = h.at("class_example_cap").get<std::size_t>();
    model.hparams.min_examples_per_candidate = h.at("min_examples_per_candidate").get<std::size_t>();
    model.hparams.abstain_margin = h.at("abstain_margin").get<double>();
    model.hparams.majority_vote = h.at("majority_vote").get<bool>();
    model.hparams.seed = h.at("seed").get<std::uint64_t>();
    for (const auto& [name, id] : j.at("feature_ids").items())
        model.feature_ids[name] = id.get<std::uint32_t>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    return model;
}

void dump_examples(const std::vector<TrainingExample>& examples,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write examples dump: " + path.string());
    for (const TrainingExample& ex : examples) {
        json j;
        j["label"] = class_label(ex.label);
        j["doc_id"] = ex.doc_id;
        j["text"] = ex.tagged_text;
        out << j.dump() << '\n';
    }
}

}  // namespace decensor
