#include "doctest.h"

#include <fstream>
#include <sstream>

#include "decensor/errors.hpp"
#include "decensor/experiment.hpp"
#include "support.hpp"

using namespace decensor;

namespace {

// Small planted-name corpus: big enough to train on, small enough to keep the
// unit suite fast.
SyntheticSpec small_spec(std::uint64_t seed, std::size_t n_names = 4) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.background_vocabulary = {"said", "that",  "today", "about", "really",
                                  "never", "again", "still", "quite", "maybe"};
    for (std::size_t i = 0; i < n_names; ++i) {
        SyntheticName n;
        n.name = std::string("Alice") + char('A' + i) + " Borrow" + char('A' + i);
        for (int w = 0; w < 12; ++w)
            n.vocabulary.push_back("ctx" + std::to_string(i) + std::string(1, char('a' + w)));
        n.post_count = 6;
        n.comment_count = 20;
        n.mention_rate = 0.6;
        spec.names.push_back(std::move(n));
    }
    return spec;
}

RunConfig small_config(std::uint64_t seed) {
    RunConfig config;
    config.k = 4;
    config.nocc_min = 30;
    config.comment_occurrence_min = 20;
    config.seed = seed;
    return config;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config validation") {
    RunConfig config;
    config.k = 1;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.k = 2;
    CHECK_NOTHROW(config.validate());
    config.window = 10;
    config.min_len = 50;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("config files parse keys and reject junk") {
    auto path = testsupport::scratch_file("run.conf");
    {
        std::ofstream out(path);
        out << "# comment line\n"
            << "k = 5\n"
            << "nocc_min = 40   # trailing comment\n"
            << "scope_mode = per_post\n"
            << "majority_vote = true\n"
            << "seed = 9\n";
    }
    RunConfig config = load_run_config(path);
    CHECK(config.k == 5);
    CHECK(config.nocc_min == 40);
    CHECK(config.scope_mode == ScopeMode::PerPost);
    CHECK(config.hparams.majority_vote);
    CHECK(config.seed == 9);

    auto bad = testsupport::scratch_file("bad.conf");
    {
        std::ofstream out(bad);
        out << "k = not-a-number\n";
    }
    CHECK_THROWS_AS(load_run_config(bad), ConfigError);
    auto unknown = testsupport::scratch_file("unknown.conf");
    {
        std::ofstream out(unknown);
        out << "mystery = 1\n";
    }
    CHECK_THROWS_AS(load_run_config(unknown), ConfigError);
}

TEST_CASE("per-name seeds are stable and name-dependent") {
    CHECK(derive_seed(1, "Paul Ryan") == derive_seed(1, "paul   RYAN"));
    CHECK(derive_seed(1, "Paul Ryan") != derive_seed(2, "Paul Ryan"));
    CHECK(derive_seed(1, "Paul Ryan") != derive_seed(1, "Mike Pence"));
}

TEST_CASE("experiment runs end to end with sane invariants") {
    Corpus corpus = generate_synthetic(small_spec(21));
    RunConfig config = small_config(21);
    ExperimentArtifacts artifacts = run_experiment(config, corpus);

    const ExperimentReport& report = artifacts.report;
    CHECK(report.k == 4);
    CHECK(report.total_names >= 3);  // at least most planted names survive
    CHECK(report.per_name.size() == report.total_names);
    CHECK(artifacts.trials.size() == report.total_posts);
    CHECK(artifacts.resolutions.size() == artifacts.trials.size());

    for (const NameResult& row : report.per_name) {
        CHECK(row.posts <= config.max_posts);
        CHECK(row.cer_accuracy <= row.global_accuracy);
        CHECK(row.random_accuracy <= 1.0 / static_cast<double>(config.k));
    }

    // No censored snippet may leak its target.
    for (const CensoredPost& post : artifacts.censored) {
        for (const CensoredSnippet& s : post.snippets) {
            std::string lowered;
            for (char c : s.censored_text)
                lowered.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
            std::string target;
            for (char c : post.target_name)
                target.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : c);
            CHECK(lowered.find(target) == std::string::npos);
        }
    }

    // Mask tokens are globally unique across the whole run.
    std::unordered_set<std::string> tokens;
    for (const CensoredPost& post : artifacts.censored)
        for (const CensoredSnippet& s : post.snippets) CHECK(tokens.insert(s.mask_token).second);
}

TEST_CASE("experiments are deterministic and artifacts byte-identical") {
    Corpus corpus = generate_synthetic(small_spec(33));
    RunConfig config = small_config(33);
    config.output_dir = testsupport::scratch_file("run-a");
    ExperimentArtifacts a = run_experiment(config, corpus);
    auto dir_a = config.output_dir;
    config.output_dir = testsupport::scratch_file("run-b");
    ExperimentArtifacts b = run_experiment(config, corpus);

    CHECK(a.report.flat.global_accuracy == b.report.flat.global_accuracy);
    CHECK(a.resolutions == b.resolutions);
    for (const char* file :
         {"report.csv", "report.json", "trials.jsonl", "censored.jsonl", "answers.jsonl"}) {
        CAPTURE(file);
        CHECK(slurp(dir_a / file) == slurp(config.output_dir / file));
    }
    CHECK(slurp(dir_a / "manifest.json").find("decensor-run-v1") != std::string::npos);
}

TEST_CASE("worker count does not change results") {
    Corpus corpus = generate_synthetic(small_spec(44));
    RunConfig config = small_config(44);
    ExperimentArtifacts serial = run_experiment(config, corpus);
    config.workers = 4;
    ExperimentArtifacts parallel = run_experiment(config, corpus);
    CHECK(serial.resolutions == parallel.resolutions);
    CHECK(serial.report.flat.global_accuracy == parallel.report.flat.global_accuracy);
}

TEST_CASE("mask seed changes tokens, not predictions") {
    Corpus corpus = generate_synthetic(small_spec(55));
    RunConfig config = small_config(55);
    ExperimentArtifacts a = run_experiment(config, corpus);
    config.mask_seed = 987654321;
    ExperimentArtifacts b = run_experiment(config, corpus);

    CHECK(a.resolutions == b.resolutions);
    bool tokens_differ = false;
    for (std::size_t p = 0; p < a.censored.size() && p < b.censored.size(); ++p)
        for (std::size_t s = 0; s < a.censored[p].snippets.size(); ++s)
            if (a.censored[p].snippets[s].mask_token != b.censored[p].snippets[s].mask_token)
                tokens_differ = true;
    CHECK(tokens_differ);
}

TEST_CASE("per-post scope mode runs and keeps the invariants") {
    Corpus corpus = generate_synthetic(small_spec(66));
    RunConfig config = small_config(66);
    config.scope_mode = ScopeMode::PerPost;
    config.comment_occurrence_min = 5;  // per-post scopes are 20 comments wide
    ExperimentArtifacts artifacts = run_experiment(config, corpus);
    CHECK(artifacts.report.scope_mode == "per_post");
    for (const NameResult& row : artifacts.report.per_name)
        CHECK(row.cer_accuracy <= row.global_accuracy);
}

TEST_CASE("ineligible names are skipped with reasons, not fatal") {
    SyntheticSpec spec = small_spec(77, 3);
    // A name that is censored everywhere it appears: no comment ever mentions
    // it, so candidate selection cannot be fair and the name must be skipped.
    SyntheticName loner;
    loner.name = "Hermit Crab";
    loner.vocabulary = {"shell", "beach", "tide", "sand", "wave", "rock"};
    loner.post_count = 6;
    loner.comment_count = 0;
    loner.mention_rate = 1.0;
    spec.names.push_back(loner);
    Corpus corpus = generate_synthetic(spec);

    RunConfig config = small_config(77);
    config.nocc_min = 5;  // low enough that the loner passes the corpus census
    ExperimentArtifacts artifacts = run_experiment(config, corpus);

    bool loner_skipped = false;
    for (const SkippedName& s : artifacts.report.skipped)
        if (s.name == "Hermit Crab") {
            loner_skipped = true;
            CHECK_FALSE(s.reason.empty());
        }
    CHECK(loner_skipped);
    for (const NameResult& row : artifacts.report.per_name) CHECK(row.name != "Hermit Crab");
}

TEST_CASE("a rendered report equals re-aggregation of its saved trials") {
    Corpus corpus = generate_synthetic(small_spec(88));
    RunConfig config = small_config(88);
    config.output_dir = testsupport::scratch_file("run-c");
    ExperimentArtifacts artifacts = run_experiment(config, corpus);

    auto trials = load_trials(config.output_dir / "trials.jsonl");
    ExperimentReport again = aggregate(trials, config.k);
    CHECK(again.flat.cer_accuracy == artifacts.report.flat.cer_accuracy);
    CHECK(again.flat.global_accuracy == artifacts.report.flat.global_accuracy);
    CHECK(again.flat.most_freq_accuracy == artifacts.report.flat.most_freq_accuracy);
    CHECK(again.flat.random_accuracy == artifacts.report.flat.random_accuracy);
    REQUIRE(again.per_name.size() == artifacts.report.per_name.size());
}
