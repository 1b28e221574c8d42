#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "idiomeval/eval.hpp"
#include "litter_fixtures.hpp"
#include "testutil.hpp"

using namespace idiomeval;

namespace {

std::map<std::string, std::string> fixture_hypotheses() {
    std::map<std::string, std::string> hyps;
    for (const auto& c : fixtures::litter_cases()) hyps[c.id] = c.hypothesis;
    return hyps;
}

}  // namespace

TEST_CASE("run_eval produces all requested sections", "[eval]") {
    const auto pairs = fixtures::litter_pairs();
    const auto hyps = fixture_hypotheses();
    const auto lex = fixtures::litter_lexicon();
    EvalOptions opts;
    opts.train_aligner = true;
    const auto report = run_eval(pairs, hyps, &lex, nullptr, nullptr, opts);
    REQUIRE(report.litter.has_value());
    REQUIRE(report.apt.has_value());
    REQUIRE(report.bleu.has_value());
    REQUIRE(report.chrf.has_value());
    CHECK(report.annotated_count == 5);
    CHECK(report.litter->triggered_pairs == 2);
    // five idioms, verdicts (T,T,F,F,F), one sentence each
    CHECK(report.litter->macro == Catch::Approx(0.4));
    CHECK(report.litter->micro == Catch::Approx(0.4));
    CHECK(report.litter->sentences.size() == 5);
    CHECK(report.apt->scores.size() == 5);
}

TEST_CASE("run_eval without a lexicon still computes global metrics", "[eval]") {
    const auto pairs = fixtures::litter_pairs();
    const auto hyps = fixture_hypotheses();
    EvalOptions opts;
    opts.litter = false;
    opts.apt = false;
    const auto report = run_eval(pairs, hyps, nullptr, nullptr, nullptr, opts);
    CHECK_FALSE(report.litter.has_value());
    CHECK(report.bleu.has_value());

    EvalOptions litter_only;
    litter_only.apt = litter_only.bleu = litter_only.chrf = false;
    CHECK_THROWS_AS(run_eval(pairs, hyps, nullptr, nullptr, nullptr, litter_only), input_error);
}

TEST_CASE("run_eval needs alignments for apt", "[eval]") {
    const auto pairs = fixtures::litter_pairs();
    const auto hyps = fixture_hypotheses();
    const auto lex = fixtures::litter_lexicon();
    EvalOptions opts;  // train_aligner off, no alignment maps
    opts.litter = false;
    opts.bleu = opts.chrf = false;
    CHECK_THROWS_AS(run_eval(pairs, hyps, &lex, nullptr, nullptr, opts), input_error);
}

TEST_CASE("report serialization is deterministic", "[eval][report]") {
    const auto pairs = fixtures::litter_pairs();
    const auto hyps = fixture_hypotheses();
    const auto lex = fixtures::litter_lexicon();
    EvalOptions opts;
    opts.train_aligner = true;

    std::ostringstream a, b;
    run_eval(pairs, hyps, &lex, nullptr, nullptr, opts).write_jsonl(a);
    run_eval(pairs, hyps, &lex, nullptr, nullptr, opts).write_jsonl(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("\"kind\":\"summary\"") != std::string::npos);
}

TEST_CASE("report renders a table and tsv", "[eval][report]") {
    const auto pairs = fixtures::litter_pairs();
    const auto hyps = fixture_hypotheses();
    const auto lex = fixtures::litter_lexicon();
    EvalOptions opts;
    opts.apt = false;
    std::ostringstream serialized;
    run_eval(pairs, hyps, &lex, nullptr, nullptr, opts).write_jsonl(serialized);

    std::istringstream in(serialized.str());
    std::ostringstream table;
    render_report_table(in, table);
    CHECK(table.str().find("LitTER") != std::string::npos);
    CHECK(table.str().find("bark up the wrong tree") != std::string::npos);

    std::istringstream again(serialized.str());
    std::ostringstream tsv;
    render_report_tsv(again, tsv);
    CHECK(tsv.str().rfind("idiom_id\tn\tlitter\tuniprec\tchrf\n", 0) == 0);
    CHECK(tsv.str().find("bread and butter\t1\t1") != std::string::npos);
}

TEST_CASE("hypothesis loading: plain and keyed formats", "[eval]") {
    testutil::TempDir dir("hyps");
    const auto pairs = fixtures::litter_pairs();

    std::string plain_text;
    for (const auto& c : fixtures::litter_cases()) plain_text += c.hypothesis + "\n";
    const auto plain = load_hypotheses(dir.file("plain.txt", plain_text), pairs);
    CHECK(plain.size() == 5);
    CHECK(plain.at("wrong-tree") == fixtures::litter_cases()[0].hypothesis);

    std::string keyed_text;
    for (const auto& c : fixtures::litter_cases()) {
        nlohmann::ordered_json j;
        j["pair_id"] = c.id;
        j["text"] = c.hypothesis;
        keyed_text += j.dump() + "\n";
    }
    const auto keyed = load_hypotheses(dir.file("keyed.jsonl", keyed_text), pairs);
    CHECK(keyed == plain);

    // plain file with the wrong line count
    CHECK_THROWS_AS(load_hypotheses(dir.file("short.txt", "only one line\n"), pairs),
                    input_error);
}
