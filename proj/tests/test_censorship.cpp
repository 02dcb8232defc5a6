#include "doctest.h"

#include <fstream>
#include <sstream>

#include "decensor/censorship.hpp"
#include "decensor/errors.hpp"
#include "decensor/text.hpp"
#include "support.hpp"

using namespace decensor;

namespace {

Document post(std::string id, std::string text, std::string created = "2016-08-01T00:00:00Z") {
    Document d;
    d.id = std::move(id);
    d.kind = DocKind::Post;
    d.page = "pg";
    d.created_at = std::move(created);
    d.text = std::move(text);
    return d;
}

const std::string kFiller =
    " while reporters waited outside the building for most of the afternoon";

Corpus posts_mentioning(const std::string& name, std::size_t n) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "2016-08-01T%02zu:%02zu:00Z", i / 60, i % 60);
        docs.push_back(post("post" + std::to_string(i),
                            "President " + name + " said nothing" + kFiller, buf));
    }
    return Corpus(std::move(docs));
}

bool is_mask_shaped(const std::string& token) {
    if (token.size() < 6 || token.size() > 10) return false;
    if (token[0] < 'A' || token[0] > 'Z') return false;
    for (std::size_t i = 1; i < token.size(); ++i)
        if (token[i] < 'a' || token[i] > 'z') return false;
    return true;
}

}  // namespace

TEST_CASE("mask tokens: shape, uniqueness, corpus absence") {
    Corpus c = posts_mentioning("Donald Trump", 3);
    MaskTokenGenerator gen(1234, c.vocabulary());
    std::unordered_set<std::string> seen;
    for (int i = 0; i < 500; ++i) {
        std::string t = gen.next();
        CHECK(is_mask_shaped(t));
        CHECK_FALSE(c.vocabulary().contains(to_lower(t)));
        CHECK(seen.insert(to_lower(t)).second);
    }
}

TEST_CASE("plan selects every post when under the cap") {
    Corpus c = posts_mentioning("Paul Ryan", 14);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Paul Ryan", 20, 7);
    CHECK(plan.selected_post_ids.size() == 14);
    CHECK_THROWS_AS(plan_censorship(idx, c, "Joe Nobody", 20, 7), NameNotFound);
}

TEST_CASE("plan sampling is deterministic and capped") {
    Corpus c = posts_mentioning("Donald Trump", 35);
    Index idx = Index::build(c);
    CensorPlan a = plan_censorship(idx, c, "Donald Trump", 20, 99);
    CensorPlan b = plan_censorship(idx, c, "Donald Trump", 20, 99);
    CHECK(a.selected_post_ids.size() == 20);
    CHECK(a.selected_post_ids == b.selected_post_ids);
    CHECK(std::is_sorted(a.selected_post_ids.begin(), a.selected_post_ids.end()));

    CensorPlan other = plan_censorship(idx, c, "Donald Trump", 20, 100);
    CHECK(other.selected_post_ids != a.selected_post_ids);
}

TEST_CASE("chronological-first selection takes the earliest posts") {
    Corpus c = posts_mentioning("Donald Trump", 35);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 5, 1, true);
    REQUIRE(plan.selected_post_ids.size() == 5);
    for (const std::string& id : {"post0", "post1", "post2", "post3", "post4"})
        CHECK(std::count(plan.selected_post_ids.begin(), plan.selected_post_ids.end(), id) == 1);
}

TEST_CASE("censoring replaces the name and nothing else") {
    Corpus c = posts_mentioning("Donald Trump", 1);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 20, 5);
    auto snippets = find_snippets(idx, c, "Donald Trump", kSnippetWindow, kSnippetMinLen,
                                  posts_only());
    MaskTokenGenerator gen(5, c.vocabulary());
    auto censored = censor(plan, snippets, gen);
    REQUIRE(censored.size() == 1);
    REQUIRE(censored[0].snippets.size() == 1);
    const CensoredSnippet& s = censored[0].snippets[0];

    CHECK(is_mask_shaped(s.mask_token));
    CHECK(s.censored_text.rfind("President " + s.mask_token + " said nothing", 0) == 0);
    CHECK(to_lower(s.censored_text).find("donald trump") == std::string::npos);
    CHECK(to_lower(s.censored_text).find("trump") == std::string::npos);
    CHECK(decensor_text(s) == s.original.window_text);
    REQUIRE(s.spans.size() == 1);
    CHECK(s.spans[0].original == "Donald Trump");
}

TEST_CASE("multiple occurrences in one snippet share one token") {
    Corpus c({post("p0", "Trump praised Trump because Trump likes Trump" + kFiller)});
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Trump", 20, 3);
    auto snippets = find_snippets(idx, c, "Trump");
    REQUIRE(snippets.size() == 4);  // one per occurrence
    MaskTokenGenerator gen(3, c.vocabulary());
    auto censored = censor(plan, snippets, gen);
    REQUIRE(censored.size() == 1);
    REQUIRE(censored[0].snippets.size() == 4);

    std::unordered_set<std::string> tokens;
    for (std::size_t i = 0; i < 4; ++i) {
        const CensoredSnippet& s = censored[0].snippets[i];
        CHECK(s.spans.size() == 4);  // all four occurrences replaced, same token
        for (const MaskSpan& span : s.spans)
            CHECK(s.censored_text.substr(span.start, span.end - span.start) == s.mask_token);
        CHECK(to_lower(s.censored_text).find("trump") == std::string::npos);
        CHECK(decensor_text(s) == s.original.window_text);
        // The focal span is the occurrence this snippet was retrieved for.
        CHECK(s.spans[s.focal_span].original ==
              s.original.window_text.substr(s.original.match_start,
                                            s.original.match_end - s.original.match_start));
        tokens.insert(s.mask_token);
    }
    CHECK(tokens.size() == 4);  // fresh token per snippet
}

TEST_CASE("reseeding changes tokens but not the surrounding text") {
    Corpus c = posts_mentioning("Donald Trump", 4);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 20, 5);
    auto snippets = find_snippets(idx, c, "Donald Trump", kSnippetWindow, kSnippetMinLen,
                                  posts_only());
    MaskTokenGenerator gen_a(5, c.vocabulary());
    MaskTokenGenerator gen_b(6, c.vocabulary());
    auto a = censor(plan, snippets, gen_a);
    auto b = censor(plan, snippets, gen_b);
    REQUIRE(a.size() == b.size());
    bool any_token_differs = false;
    for (std::size_t p = 0; p < a.size(); ++p) {
        REQUIRE(a[p].snippets.size() == b[p].snippets.size());
        for (std::size_t i = 0; i < a[p].snippets.size(); ++i) {
            const CensoredSnippet& x = a[p].snippets[i];
            const CensoredSnippet& y = b[p].snippets[i];
            if (x.mask_token != y.mask_token) any_token_differs = true;
            CHECK(decensor_text(x) == decensor_text(y));
            CHECK(x.spans.size() == y.spans.size());
        }
    }
    CHECK(any_token_differs);
}

TEST_CASE("censoring preserves case-insensitive matches") {
    Corpus c({post("p0", "DONALD TRUMP met donald trump and Donald Trump" + kFiller)});
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 20, 8);
    auto snippets = find_snippets(idx, c, "Donald Trump");
    MaskTokenGenerator gen(8, c.vocabulary());
    auto censored = censor(plan, snippets, gen);
    for (const CensoredSnippet& s : censored[0].snippets) {
        CHECK(to_lower(s.censored_text).find("donald") == std::string::npos);
        CHECK(decensor_text(s) == s.original.window_text);  // original casings restored
    }
}

TEST_CASE("snippets from unselected posts are rejected") {
    Corpus c = posts_mentioning("Donald Trump", 2);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 20, 5);
    plan.selected_post_ids = {"post0"};
    auto snippets = find_snippets(idx, c, "Donald Trump");
    MaskTokenGenerator gen(5, c.vocabulary());
    CHECK_THROWS_AS(censor(plan, snippets, gen), Error);
}

TEST_CASE("serialized censored sets never contain the answer") {
    Corpus c = posts_mentioning("Donald Trump", 5);
    Index idx = Index::build(c);
    CensorPlan plan = plan_censorship(idx, c, "Donald Trump", 20, 5);
    auto snippets = find_snippets(idx, c, "Donald Trump", kSnippetWindow, kSnippetMinLen,
                                  posts_only());
    MaskTokenGenerator gen(5, c.vocabulary());
    auto censored = censor(plan, snippets, gen);

    auto censored_path = testsupport::scratch_file("censored.jsonl");
    auto answers_path = testsupport::scratch_file("answers.jsonl");
    save_censored(censored, censored_path);
    save_answers(censored, answers_path);

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::string censored_file = slurp(censored_path);
    CHECK(to_lower(censored_file).find("donald trump") == std::string::npos);
    CHECK(censored_file.find("mask_token") != std::string::npos);
    CHECK(censored_file.find("char_start") != std::string::npos);
    std::string answers_file = slurp(answers_path);
    CHECK(answers_file.find("Donald Trump") != std::string::npos);
}
