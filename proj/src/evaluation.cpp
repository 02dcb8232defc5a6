#include "decensor/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "json.hpp"

namespace decensor {

using nlohmann::json;

std::string format2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

std::vector<TrialRecord> score_trials(const std::vector<Resolution>& resolutions,
                                      const CandidateSet& candidates,
                                      const std::unordered_map<std::string, std::string>& answers) {
    const bool in_top_k = candidates.in_top_k();
    const std::string most_freq = baseline_most_frequent(candidates);
    const bool most_freq_hit =
        normalize_name(most_freq) == normalize_name(candidates.true_name);

    std::vector<TrialRecord> out;
    out.reserve(resolutions.size());
    for (const Resolution& res : resolutions) {
        auto it = answers.find(res.post_id);
        if (it == answers.end()) throw MissingAnswer(res.post_id);

        TrialRecord trial;
        trial.name = it->second;
        trial.post_id = res.post_id;
        // Abstentions leave predicted_class at ABSTAIN and count as wrong.
        trial.correct = res.predicted_class == kClassAnon &&
                        normalize_name(res.predicted_name) == normalize_name(it->second);
        trial.in_top_k = in_top_k;
        trial.most_freq_hit = most_freq_hit;
        trial.candidate_count = candidates.k;
        out.push_back(std::move(trial));
    }
    return out;
}

ExperimentReport aggregate(const std::vector<TrialRecord>& trials, std::size_t k) {
    if (trials.empty()) throw Error("aggregate: no trials");

    ExperimentReport report;
    report.k = k;

    struct Bucket {
        std::size_t posts = 0;
        std::size_t correct = 0;
        std::size_t correct_and_in = 0;
        std::size_t in_top_k = 0;
        std::size_t most_freq = 0;
        std::size_t order = 0;
    };
    std::map<std::string, Bucket> by_name;
    std::size_t order = 0;
    for (const TrialRecord& t : trials) {
        Bucket& b = by_name[t.name];
        if (b.posts == 0) b.order = order++;
        ++b.posts;
        if (t.correct) ++b.correct;
        if (t.correct && t.in_top_k) ++b.correct_and_in;
        if (t.in_top_k) ++b.in_top_k;
        if (t.most_freq_hit) ++b.most_freq;
    }

    std::vector<std::pair<std::string, Bucket>> ordered(by_name.begin(), by_name.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.second.order < b.second.order; });

    Bucket flat;
    for (const auto& [name, b] : ordered) {
        NameResult row;
        row.name = name;
        row.posts = b.posts;
        double n = static_cast<double>(b.posts);
        row.cer_accuracy = b.correct_and_in / n;
        row.global_accuracy = b.correct / n;
        row.most_freq_accuracy = b.most_freq / n;
        row.random_accuracy = b.in_top_k / n / static_cast<double>(k);
        report.per_name.push_back(std::move(row));

        flat.posts += b.posts;
        flat.correct += b.correct;
        flat.correct_and_in += b.correct_and_in;
        flat.in_top_k += b.in_top_k;
        flat.most_freq += b.most_freq;

        report.mu.cer_accuracy += report.per_name.back().cer_accuracy;
        report.mu.global_accuracy += report.per_name.back().global_accuracy;
        report.mu.most_freq_accuracy += report.per_name.back().most_freq_accuracy;
        report.mu.random_accuracy += report.per_name.back().random_accuracy;
    }

    double n_trials = static_cast<double>(flat.posts);
    report.flat.trials = flat.posts;
    report.flat.cer_accuracy = flat.correct_and_in / n_trials;
    report.flat.global_accuracy = flat.correct / n_trials;
    report.flat.most_freq_accuracy = flat.most_freq / n_trials;
    report.flat.random_accuracy = flat.in_top_k / n_trials / static_cast<double>(k);

    double n_names = static_cast<double>(report.per_name.size());
    report.mu.trials = report.per_name.size();
    report.mu.cer_accuracy /= n_names;
    report.mu.global_accuracy /= n_names;
    report.mu.most_freq_accuracy /= n_names;
    report.mu.random_accuracy /= n_names;

    report.total_posts = flat.posts;
    report.total_names = report.per_name.size();
    return report;
}

std::string baseline_most_frequent(const CandidateSet& candidates) {
    if (candidates.counts.empty()) throw Error("baseline_most_frequent: empty candidate counts");
    return candidates.counts.front().name;
}

double baseline_random(const CandidateSet& candidates, std::size_t k) {
    return candidates.in_top_k() ? 1.0 / static_cast<double>(k) : 0.0;
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << "name,posts,cer,global,most_freq,random\n";
    for (const NameResult& row : report.per_name) {
        out << row.name << ',' << row.posts << ',' << format2(row.cer_accuracy) << ','
            << format2(row.global_accuracy) << ',' << format2(row.most_freq_accuracy) << ','
            << format2(row.random_accuracy) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

json row_to_json(const NameResult& row) {
    return json{{"name", row.name},
                {"posts", row.posts},
                {"cer", row.cer_accuracy},
                {"global", row.global_accuracy},
                {"most_freq", row.most_freq_accuracy},
                {"random", row.random_accuracy}};
}

json aggregate_to_json(const AggregateRow& row) {
    return json{{"trials", row.trials},
                {"cer", row.cer_accuracy},
                {"global", row.global_accuracy},
                {"most_freq", row.most_freq_accuracy},
                {"random", row.random_accuracy}};
}

}  // namespace

void write_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    json j;
    j["settings"] = {{"k", report.k},
                     {"nocc_min", report.nocc_min},
                     {"seed", report.seed},
                     {"scope_mode", report.scope_mode}};
    // The CER column reads accuracy gated on natural top-k membership; this is
    // a reconstruction of the published metric, noted here for transparency.
    j["metric_note"] = "cer = mean(correct AND in_top_k); global = mean(correct)";
    j["per_name"] = json::array();
    for (const NameResult& row : report.per_name) j["per_name"].push_back(row_to_json(row));
    j["flat"] = aggregate_to_json(report.flat);
    j["mu_average"] = aggregate_to_json(report.mu);
    j["total_posts"] = report.total_posts;
    j["total_names"] = report.total_names;
    j["skipped"] = json::array();
    for (const SkippedName& s : report.skipped)
        j["skipped"].push_back({{"name", s.name}, {"reason", s.reason}});

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << j.dump(2) << '\n';
}

ExperimentReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    ExperimentReport report;
    report.k = j["settings"].value("k", std::size_t{0});
    report.nocc_min = j["settings"].value("nocc_min", std::size_t{0});
    report.seed = j["settings"].value("seed", std::uint64_t{0});
    report.scope_mode = j["settings"].value("scope_mode", "");
    for (const json& row : j["per_name"]) {
        NameResult r;
        r.name = row.at("name").get<std::string>();
        r.posts = row.at("posts").get<std::size_t>();
        r.cer_accuracy = row.at("cer").get<double>();
        r.global_accuracy = row.at("global").get<double>();
        r.most_freq_accuracy = row.at("most_freq").get<double>();
        r.random_accuracy = row.at("random").get<double>();
        report.per_name.push_back(std::move(r));
    }
    report.total_posts = j.value("total_posts", std::size_t{0});
    report.total_names = j.value("total_names", std::size_t{0});
    return report;
}

void save_trials(const std::vector<TrialRecord>& trials, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write trials: " + path.string());
    for (const TrialRecord& t : trials) {
        json j;
        j["name"] = t.name;
        j["post_id"] = t.post_id;
        j["correct"] = t.correct;
        j["in_top_k"] = t.in_top_k;
        j["most_freq_hit"] = t.most_freq_hit;
        j["k"] = t.candidate_count;
        out << j.dump() << '\n';
    }
}

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trials: " + path.string());
    std::vector<TrialRecord> out;
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
        TrialRecord t;
        t.name = j.at("name").get<std::string>();
        t.post_id = j.at("post_id").get<std::string>();
        t.correct = j.at("correct").get<bool>();
        t.in_top_k = j.at("in_top_k").get<bool>();
        t.most_freq_hit = j.at("most_freq_hit").get<bool>();
        t.candidate_count = j.at("k").get<std::size_t>();
        out.push_back(std::move(t));
    }
    return out;
}

void write_chart_summary(const std::vector<ExperimentReport>& grid,
                         const std::filesystem::path& path) {
    json j = json::array();
    for (const ExperimentReport& report : grid) {
        j.push_back({{"k", report.k},
                     {"nocc_min", report.nocc_min},
                     {"flat", aggregate_to_json(report.flat)},
                     {"mu_average", aggregate_to_json(report.mu)}});
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write chart summary: " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace decensor
