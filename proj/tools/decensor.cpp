// Command-line front end for the de-censorship pipeline.
//
// Subcommands: ingest, census, censor, run, report. `run` is the composition
// of the stage subcommands over one configuration.

#include <cstdlib>
#include <iostream>
#include <unordered_set>

#include "CLI11.hpp"
#include "decensor/censorship.hpp"
#include "decensor/errors.hpp"
#include "decensor/experiment.hpp"

namespace {

using namespace decensor;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

void apply_env_overrides(RunConfig& config) {
    if (const char* out = std::getenv("DECENSOR_OUT")) config.output_dir = out;
    if (const char* workers = std::getenv("DECENSOR_WORKERS"))
        config.workers = std::stoull(workers);
}

struct CommonOptions {
    std::string config_path;
    std::string corpus_path;
    std::string gazetteer_path;
    std::string denylist_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::size_t nocc_min = 0;
    bool no_heuristic = false;

    RunConfig build() const {
        RunConfig config;
        if (!config_path.empty()) config = load_run_config(config_path);
        if (!corpus_path.empty()) config.corpus_path = corpus_path;
        if (!gazetteer_path.empty())
            config.gazetteer = RecognizerConfig::read_list_file(gazetteer_path);
        if (!denylist_path.empty())
            config.denylist = RecognizerConfig::read_list_file(denylist_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (seed) config.seed = seed;
        if (k) config.k = k;
        if (nocc_min) config.nocc_min = nocc_min;
        if (no_heuristic) config.use_heuristic = false;
        apply_env_overrides(config);
        return config;
    }

    void attach(CLI::App* cmd, bool with_corpus = true) {
        cmd->add_option("--config", config_path, "key=value configuration file");
        if (with_corpus) cmd->add_option("--corpus", corpus_path, "line-delimited JSON corpus");
        cmd->add_option("--gazetteer", gazetteer_path, "known person names, one per line");
        cmd->add_option("--denylist", denylist_path, "names to exclude, one per line");
        cmd->add_option("--out", output_dir, "output directory");
        cmd->add_option("--seed", seed, "experiment seed");
        cmd->add_option("--k", k, "number of candidates");
        cmd->add_option("--nocc-min", nocc_min, "corpus-wide occurrence floor");
        cmd->add_flag("--no-heuristic", no_heuristic, "disable capitalized-run detection");
    }
};

int cmd_ingest(const CommonOptions& common, const std::string& synthetic_spec,
               const std::string& out_path) {
    Corpus corpus = synthetic_spec.empty()
                        ? load_corpus(common.build().corpus_path)
                        : generate_synthetic(load_synthetic_spec(synthetic_spec));
    std::cerr << "loaded " << corpus.size() << " documents\n";
    if (!out_path.empty()) save_corpus(corpus, out_path);
    return kExitOk;
}

int cmd_census(const CommonOptions& common) {
    RunConfig config = common.build();
    Corpus corpus = load_corpus(config.corpus_path);
    NameCensus result = census(corpus, make_recognizer(config), config.nocc_min);
    std::cout << "name,count\n";
    for (const NameCount& nc : result.counts) std::cout << nc.name << ',' << nc.count << '\n';
    return kExitOk;
}

int cmd_censor(const CommonOptions& common, const std::string& target_name) {
    RunConfig config = common.build();
    if (config.output_dir.empty()) throw ConfigError("censor requires --out");
    Corpus corpus = load_corpus(config.corpus_path);
    Index index = Index::build(corpus);

    CensorPlan plan = plan_censorship(index, corpus, target_name, config.max_posts,
                                      derive_seed(config.seed, target_name),
                                      config.chronological_first);
    std::unordered_set<std::string> selected(plan.selected_post_ids.begin(),
                                             plan.selected_post_ids.end());
    auto snippets = find_snippets(index, corpus, target_name, config.window, config.min_len,
                                  both(posts_only(), [selected](const Document& d) {
                                      return selected.contains(d.id);
                                  }));
    std::uint64_t mask_base = config.mask_seed ? config.mask_seed : config.seed;
    MaskTokenGenerator tokens(derive_seed(mask_base, target_name), corpus.vocabulary());
    auto censored = censor(plan, snippets, tokens);

    std::filesystem::create_directories(config.output_dir);
    save_censored(censored, config.output_dir / "censored.jsonl");
    save_answers(censored, config.output_dir / "answers.jsonl");
    std::cerr << "censored " << censored.size() << " posts\n";
    return kExitOk;
}

int cmd_run(const CommonOptions& common) {
    RunConfig config = common.build();
    if (config.output_dir.empty()) throw ConfigError("run requires --out (or DECENSOR_OUT)");
    ExperimentArtifacts artifacts = run_experiment(config);
    std::cerr << "names: " << artifacts.report.total_names
              << "  posts: " << artifacts.report.total_posts
              << "  global: " << format2(artifacts.report.flat.global_accuracy)
              << "  cer: " << format2(artifacts.report.flat.cer_accuracy) << '\n';
    return kExitOk;
}

int cmd_report(const std::string& trials_path, std::size_t k, const std::string& out_dir) {
    auto trials = load_trials(trials_path);
    ExperimentReport report = aggregate(trials, k);
    std::filesystem::create_directories(out_dir);
    write_report_csv(report, std::filesystem::path(out_dir) / "report.csv");
    write_report_json(report, std::filesystem::path(out_dir) / "report.json");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"de-censorship of posts by snippet classification"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* ingest = app.add_subcommand("ingest", "validate a corpus or generate a synthetic one");
    std::string synthetic_spec, ingest_out;
    common.attach(ingest);
    ingest->add_option("--synthetic", synthetic_spec, "synthetic corpus spec (JSON)");
    ingest->add_option("--write", ingest_out, "write the validated corpus here");

    auto* census_cmd = app.add_subcommand("census", "name frequency table over the corpus");
    common.attach(census_cmd);

    auto* censor_cmd = app.add_subcommand("censor", "censor one name's posts");
    std::string target_name;
    common.attach(censor_cmd);
    censor_cmd->add_option("--name", target_name, "target name to censor")->required();

    auto* run_cmd = app.add_subcommand("run", "full experiment");
    common.attach(run_cmd);

    auto* report_cmd = app.add_subcommand("report", "re-render a report from stored trials");
    std::string trials_path, report_out;
    std::size_t report_k = 10;
    report_cmd->add_option("--trials", trials_path, "trials.jsonl from a previous run")->required();
    report_cmd->add_option("--k", report_k, "number of candidates used in the run");
    report_cmd->add_option("--out", report_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(common, synthetic_spec, ingest_out);
        if (census_cmd->parsed()) return cmd_census(common);
        if (censor_cmd->parsed()) return cmd_censor(common, target_name);
        if (run_cmd->parsed()) return cmd_run(common);
        if (report_cmd->parsed()) return cmd_report(trials_path, report_k, report_out);
    } catch (const decensor::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const decensor::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
