#include "decensor/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <unordered_set>

#include "decensor/censorship.hpp"
#include "decensor/errors.hpp"
#include "decensor/snippet_index.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

DocFilter only_docs(const std::vector<std::string>& doc_ids) {
    auto wanted = std::make_shared<std::unordered_set<std::string>>(doc_ids.begin(), doc_ids.end());
    return [wanted](const Document& d) { return wanted->contains(d.id); };
}

std::size_t count_of(const std::vector<CandidateCount>& counts, const std::string& name) {
    const std::string key = normalize_name(name);
    for (const CandidateCount& c : counts)
        if (normalize_name(c.name) == key) return c.count;
    return 0;
}

std::vector<std::string> class_names_for(const CandidateSet& set) {
    std::vector<std::string> names{set.true_name};
    for (const std::string& c : set.top_k)
        if (normalize_name(c) != normalize_name(set.true_name)) names.push_back(c);
    return names;
}

struct NameOutcome {
    std::vector<TrialRecord> trials;
    std::vector<Resolution> resolutions;
    std::vector<SkippedName> skipped;
};

struct NameJob {
    std::string name;
    CensorPlan plan;
    std::vector<CensoredPost> censored;
};

// Candidate selection, training, and resolution for one target name over one
// candidate-counting scope (the pooled comment set or a single post's).
void run_scope(const RunConfig& config, const Corpus& corpus, const Index& index,
               const RecognizerConfig& recognizer, const NameJob& job,
               const std::vector<std::string>& count_scope,
               const std::vector<const CensoredPost*>& posts, NameOutcome& outcome) {
    std::vector<CandidateCount> counts = extract_candidates(corpus, recognizer, count_scope);

    std::size_t true_count = count_of(counts, job.name);
    if (true_count < config.comment_occurrence_min) {
        outcome.skipped.push_back(
            {job.name, "only " + std::to_string(true_count) + " comment occurrences (need " +
                           std::to_string(config.comment_occurrence_min) + ")"});
        return;
    }

    CandidateSet set;
    try {
        set = select_top_k(std::move(counts), config.k, job.name);
    } catch (const FairnessViolation&) {
        outcome.skipped.push_back({job.name, "true name absent from scoped comments"});
        return;
    }
    set.post_scope = job.plan.selected_post_ids;

    auto per_candidate =
        fetch_training_snippets(index, corpus, set, job.plan.selected_post_ids,
                                config.hparams.min_examples_per_candidate, config.window,
                                config.min_len);

    std::uint64_t name_seed = derive_seed(config.seed, job.name);
    std::uint64_t mask_base = config.mask_seed ? config.mask_seed : splitmix64(config.seed);
    auto examples = build_examples(per_candidate, set, corpus, config.hparams,
                                   derive_seed(mask_base, job.name));

    CerHyperparameters hp = config.hparams;
    hp.seed = name_seed;
    CerModel model;
    try {
        model = train(examples, hp, class_names_for(set));
    } catch (const EmptyTrainingSet& e) {
        outcome.skipped.push_back({job.name, std::string("untrainable: ") + e.what()});
        return;
    }

    std::unordered_map<std::string, std::string> answers;
    std::vector<Resolution> resolutions;
    for (const CensoredPost* post : posts) {
        answers[post->post_id] = post->target_name;
        resolutions.push_back(resolve(model, *post));
    }
    auto trials = score_trials(resolutions, set, answers);
    outcome.trials.insert(outcome.trials.end(), trials.begin(), trials.end());
    outcome.resolutions.insert(outcome.resolutions.end(), resolutions.begin(), resolutions.end());
}

NameOutcome run_name(const RunConfig& config, const Corpus& corpus, const Index& index,
                     const RecognizerConfig& recognizer, const NameJob& job) {
    NameOutcome outcome;
    std::vector<const CensoredPost*> posts;
    for (const CensoredPost& p : job.censored) posts.push_back(&p);

    if (config.scope_mode == ScopeMode::Pooled) {
        run_scope(config, corpus, index, recognizer, job, job.plan.selected_post_ids, posts,
                  outcome);
    } else {
        for (const CensoredPost* post : posts) {
            run_scope(config, corpus, index, recognizer, job, {post->post_id}, {post}, outcome);
        }
    }
    return outcome;
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(const std::filesystem::path&)>& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    writer(tmp);
    std::filesystem::rename(tmp, path);
}

}  // namespace

void RunConfig::validate() const {
    if (k < 2) throw ConfigError("k must be >= 2");
    if (nocc_min < 1) throw ConfigError("nocc_min must be >= 1");
    if (comment_occurrence_min < 1) throw ConfigError("comment_occurrence_min must be >= 1");
    if (max_posts < 1) throw ConfigError("max_posts must be >= 1");
    if (window < min_len) throw ConfigError("snippet window must be >= min_len");
    if (hparams.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::uint64_t derive_seed(std::uint64_t seed, const std::string& name) {
    return splitmix64(seed ^ fnv1a(normalize_name(name)));
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());

    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed = squeeze_spaces(line);
        if (trimmed.empty()) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key = squeeze_spaces(trimmed.substr(0, eq));
        std::string value = squeeze_spaces(trimmed.substr(eq + 1));

        auto as_uint = [&](const std::string& v) -> std::uint64_t {
            try {
                return std::stoull(v);
            } catch (const std::exception&) {
                throw ConfigError("config line " + std::to_string(line_no) + ": bad number: " + v);
            }
        };
        auto as_bool = [&](const std::string& v) {
            if (v == "true" || v == "1") return true;
            if (v == "false" || v == "0") return false;
            throw ConfigError("config line " + std::to_string(line_no) + ": bad boolean: " + v);
        };

        if (key == "corpus") config.corpus_path = value;
        else if (key == "gazetteer") config.gazetteer = RecognizerConfig::read_list_file(value);
        else if (key == "denylist") config.denylist = RecognizerConfig::read_list_file(value);
        else if (key == "titles") config.title_markers = RecognizerConfig::read_list_file(value);
        else if (key == "use_heuristic") config.use_heuristic = as_bool(value);
        else if (key == "k") config.k = as_uint(value);
        else if (key == "nocc_min") config.nocc_min = as_uint(value);
        else if (key == "comment_occurrence_min") config.comment_occurrence_min = as_uint(value);
        else if (key == "max_posts") config.max_posts = as_uint(value);
        else if (key == "window") config.window = as_uint(value);
        else if (key == "min_len") config.min_len = as_uint(value);
        else if (key == "epochs") config.hparams.epochs = as_uint(value);
        else if (key == "context_tokens") config.hparams.context_tokens = as_uint(value);
        else if (key == "class_cap") config.hparams.class_example_cap = as_uint(value);
        else if (key == "min_train") config.hparams.min_examples_per_candidate = as_uint(value);
        else if (key == "abstain_margin") config.hparams.abstain_margin = std::stod(value);
        else if (key == "majority_vote") config.hparams.majority_vote = as_bool(value);
        else if (key == "seed") config.seed = as_uint(value);
        else if (key == "mask_seed") config.mask_seed = as_uint(value);
        else if (key == "scope_mode") {
            if (value == "pooled") config.scope_mode = ScopeMode::Pooled;
            else if (value == "per_post") config.scope_mode = ScopeMode::PerPost;
            else throw ConfigError("scope_mode must be pooled or per_post");
        }
        else if (key == "chronological_first") config.chronological_first = as_bool(value);
        else if (key == "workers") config.workers = as_uint(value);
        else if (key == "output_dir") config.output_dir = value;
        else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key: " + key);
    }
    return config;
}

RecognizerConfig make_recognizer(const RunConfig& config) {
    return RecognizerConfig(config.gazetteer, config.denylist, config.title_markers,
                            config.use_heuristic);
}

ExperimentArtifacts run_experiment(const RunConfig& config) {
    return run_experiment(config, load_corpus(config.corpus_path));
}

ExperimentArtifacts run_experiment(const RunConfig& config, const Corpus& corpus) {
    config.validate();
    const Index index = Index::build(corpus);
    const RecognizerConfig recognizer = make_recognizer(config);

    NameCensus eligible = census(corpus, recognizer, config.nocc_min);

    ExperimentArtifacts artifacts;
    std::vector<SkippedName> skipped;

    // Censorship runs sequentially so mask tokens stay globally unique.
    std::uint64_t mask_base = config.mask_seed ? config.mask_seed : splitmix64(config.seed);
    MaskTokenGenerator mask_tokens(splitmix64(mask_base), corpus.vocabulary());
    std::vector<NameJob> jobs;
    for (const NameCount& nc : eligible.counts) {
        NameJob job;
        job.name = nc.name;
        try {
            job.plan = plan_censorship(index, corpus, nc.name, config.max_posts,
                                       derive_seed(config.seed, nc.name),
                                       config.chronological_first);
        } catch (const NameNotFound&) {
            skipped.push_back({nc.name, "no post snippet yields the name"});
            continue;
        }
        auto snippets = find_snippets(index, corpus, nc.name, config.window, config.min_len,
                                      both(posts_only(), only_docs(job.plan.selected_post_ids)));
        job.censored = censor(job.plan, snippets, mask_tokens);
        jobs.push_back(std::move(job));
    }

    // Per-name stages are independent; results land in per-name slots so the
    // merged output does not depend on scheduling.
    std::vector<NameOutcome> outcomes(jobs.size());
    if (config.workers <= 1 || jobs.size() <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            outcomes[i] = run_name(config, corpus, index, recognizer, jobs[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                outcomes[i] = run_name(config, corpus, index, recognizer, jobs[i]);
            }
        };
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < std::min(config.workers, jobs.size()); ++w)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        artifacts.trials.insert(artifacts.trials.end(), outcomes[i].trials.begin(),
                                outcomes[i].trials.end());
        artifacts.resolutions.insert(artifacts.resolutions.end(), outcomes[i].resolutions.begin(),
                                     outcomes[i].resolutions.end());
        skipped.insert(skipped.end(), outcomes[i].skipped.begin(), outcomes[i].skipped.end());
        if (!outcomes[i].trials.empty()) {
            artifacts.censored.insert(artifacts.censored.end(), jobs[i].censored.begin(),
                                      jobs[i].censored.end());
        }
    }

    if (artifacts.trials.empty())
        throw Error("run_experiment: every eligible name was skipped");

    artifacts.report = aggregate(artifacts.trials, config.k);
    artifacts.report.nocc_min = config.nocc_min;
    artifacts.report.seed = config.seed;
    artifacts.report.scope_mode = config.scope_mode == ScopeMode::Pooled ? "pooled" : "per_post";
    artifacts.report.skipped = std::move(skipped);

    if (!config.output_dir.empty()) write_artifacts(artifacts, config);
    return artifacts;
}

void write_artifacts(const ExperimentArtifacts& artifacts, const RunConfig& config) {
    std::filesystem::create_directories(config.output_dir);
    const auto& dir = config.output_dir;

    atomic_write(dir / "report.csv",
                 [&](const auto& p) { write_report_csv(artifacts.report, p); });
    atomic_write(dir / "report.json",
                 [&](const auto& p) { write_report_json(artifacts.report, p); });
    atomic_write(dir / "trials.jsonl", [&](const auto& p) { save_trials(artifacts.trials, p); });
    atomic_write(dir / "censored.jsonl",
                 [&](const auto& p) { save_censored(artifacts.censored, p); });
    atomic_write(dir / "answers.jsonl",
                 [&](const auto& p) { save_answers(artifacts.censored, p); });

    json manifest;
    manifest["format"] = "decensor-run-v1";
    manifest["settings"] = {{"k", config.k},
                            {"nocc_min", config.nocc_min},
                            {"comment_occurrence_min", config.comment_occurrence_min},
                            {"max_posts", config.max_posts},
                            {"window", config.window},
                            {"min_len", config.min_len},
                            {"epochs", config.hparams.epochs},
                            {"context_tokens", config.hparams.context_tokens},
                            {"class_cap", config.hparams.class_example_cap},
                            {"seed", config.seed},
                            {"mask_seed", config.mask_seed},
                            {"scope_mode",
                             config.scope_mode == ScopeMode::Pooled ? "pooled" : "per_post"},
                            {"use_heuristic", config.use_heuristic}};
    atomic_write(dir / "manifest.json", [&](const auto& p) {
        std::ofstream out(p, std::ios::trunc);
        if (!out) throw IoError("cannot write manifest: " + p.string());
        out << manifest.dump(2) << '\n';
    });
}

}  // namespace decensor
