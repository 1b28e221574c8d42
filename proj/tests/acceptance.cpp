// Acceptance suite: runs every release criterion and prints one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "idiomeval/idiomeval.hpp"
#include "litter_fixtures.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace idiomeval;

namespace {

int failures = 0;

class Criterion {
  public:
    Criterion(int number, std::string name)
        : number_(number), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok) {
            ok_ = false;
            details_.push_back(detail);
        }
    }

    void require_under_seconds(double limit) {
        const double s = elapsed();
        check(s < limit, "runtime " + std::to_string(s) + "s exceeds " + std::to_string(limit) + "s");
    }

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    ~Criterion() {
        std::ostringstream line;
        line << (ok_ ? "PASS" : "FAIL") << " " << number_ << " " << name_ << " ("
             << std::fixed << std::setprecision(2) << elapsed() << "s)";
        std::cout << line.str() << '\n';
        for (const auto& d : details_) std::cout << "       " << d << '\n';
        if (!ok_) ++failures;
    }

  private:
    int number_;
    std::string name_;
    bool ok_ = true;
    std::vector<std::string> details_;
    std::chrono::steady_clock::time_point start_;
};

// --- 1: the five worked examples reproduce their verdicts -------------------

void criterion_worked_examples() {
    Criterion c(1, "worked-example-fidelity");
    const auto lex = fixtures::litter_lexicon();
    for (const auto& f : fixtures::litter_cases()) {
        const auto pair = make_annotated_pair(f.id, f.source, f.reference,
                                              {{f.idiom, f.span_start, f.span_end, 0, 0}});
        const auto filtered =
            filter_by_reference(build_blocklists(pair, pair.spans[0], lex), pair.target_tokens);
        const auto verdict = check_hypothesis(filtered, tokenize(f.hypothesis));
        c.check(verdict.triggered == f.expect_error, f.id + ": verdict mismatch");
        c.check(verdict.triggering_hypothesis_words() == f.expect_triggers,
                f.id + ": triggering set mismatch");
    }
    c.require_under_seconds(1.0);
}

// --- 2: scoring references as hypotheses yields exactly zero ----------------

void criterion_self_translation_zero() {
    Criterion c(2, "self-translation-zero");
    testutil::Rand rand(1111);
    std::size_t scored = 0;
    for (int round = 0; round < 10; ++round) {
        BilingualLexicon lex;
        std::vector<std::string> vocab;
        for (int k = 0; k < 40; ++k) vocab.push_back(rand.word(3, 7));
        for (int k = 0; k < 120; ++k)
            lex.add(vocab[rand.below(vocab.size())], vocab[rand.below(vocab.size())]);

        std::vector<AnnotatedPair> pairs;
        std::map<std::string, std::string> hyps;
        for (int k = 0; k < 100; ++k) {
            std::string src, tgt;
            for (int w = 0; w < 7; ++w) {
                src += (w ? " " : "") + vocab[rand.below(vocab.size())];
                tgt += (w ? " " : "") + vocab[rand.below(vocab.size())];
            }
            const std::size_t start = rand.below(5);
            const std::string id = std::to_string(round) + "_" + std::to_string(k);
            pairs.push_back(
                make_annotated_pair(id, src, tgt, {{"idiom", start, start + 1 + rand.below(2), 0, 0}}));
            hyps[id] = tgt;
        }
        const auto result = litter_corpus(pairs, hyps, lex);
        scored += result.evaluated_pairs;
        c.check(result.macro == 0.0, "macro nonzero in round " + std::to_string(round));
        c.check(result.micro == 0.0, "micro nonzero in round " + std::to_string(round));
    }
    c.check(scored == 1000, "expected 1000 scored pairs, got " + std::to_string(scored));
}

// --- 3: micro 0.9 / macro 0.5 on the skewed fixture -------------------------

void criterion_macro_micro_separation() {
    Criterion c(3, "macro-micro-separation");
    BilingualLexicon lex;
    lex.add("alpha", "alphax");
    lex.add("beta", "betax");
    std::vector<AnnotatedPair> pairs;
    std::map<std::string, std::string> hyps;
    for (int k = 0; k < 9; ++k) {
        const std::string id = "a" + std::to_string(k);
        pairs.push_back(make_annotated_pair(id, "alpha now", "clean", {{"alpha", 0, 1, 0, 0}}));
        hyps[id] = "literal alphax output";
    }
    pairs.push_back(make_annotated_pair("b0", "beta now", "clean", {{"beta", 0, 1, 0, 0}}));
    hyps["b0"] = "clean output";

    const auto result = litter_corpus(pairs, hyps, lex);
    c.check(result.micro == 0.9, "micro " + std::to_string(result.micro) + " != 0.9");
    c.check(result.macro == 0.5, "macro " + std::to_string(result.macro) + " != 0.5");
}

// --- 4: pattern matcher demo -------------------------------------------------

void criterion_matcher_demo() {
    Criterion c(4, "pattern-matcher-demo");
    const auto pattern = compile_pattern("pull the wool over someone's eyes");
    struct Demo {
        std::string sentence;
        std::size_t start, end;
    };
    const std::vector<Demo> demos = {
        {"He tried pulling the wool over John's eyes by hiding the profits in separate accounts, "
         "but he was quick to catch onto his scheme.",
         2, 9},
        {"He tried pulling the wool over James' eyes by hiding the profits in separate accounts, "
         "but he was quick to catch onto his scheme.",
         2, 9},
        {"He tried pulling the wool over our eyes by hiding the profits in separate accounts, "
         "but we were quick to catch onto his scheme.",
         2, 8},
        {"Don't try to pull the wool over her eyes. She's too smart.", 4, 10},
    };
    for (const auto& d : demos) {
        const auto tokens = tokenize(d.sentence);
        const auto spans = find_matches(pattern, analyze(tokens, builtin_lemmatizer()), tokens);
        c.check(spans.size() == 1, "expected one match in: " + d.sentence);
        if (spans.size() == 1) {
            c.check(spans[0].token_start == d.start && spans[0].token_end == d.end,
                    "span [" + std::to_string(spans[0].token_start) + "," +
                        std::to_string(spans[0].token_end) + ") in: " + d.sentence);
        }
    }
    const auto control = tokenize("he was quick to catch onto his scheme");
    c.check(find_matches(pattern, analyze(control, builtin_lemmatizer()), control).empty(),
            "negative control matched");
}

// --- 5: aligner recovers a synthetic bijection -------------------------------

void criterion_aligner_sanity() {
    Criterion c(5, "aligner-bijection-recovery");
    testutil::Rand rand(2222);
    const int vocab_size = 30;
    std::vector<SentencePair> fwd_bitext, rev_bitext;
    std::vector<std::set<std::pair<std::size_t, std::size_t>>> gold;
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> sentences;

    for (int s = 0; s < 200; ++s) {
        const std::size_t len = 6 + rand.below(5);
        // distinct source words per sentence keep the gold alignment unambiguous
        std::set<int> chosen;
        while (chosen.size() < len) chosen.insert(static_cast<int>(rand.below(vocab_size)));
        std::vector<int> ids(chosen.begin(), chosen.end());
        idiomeval::detail::SplitMix64 shuffler(rand.below(1u << 30));
        idiomeval::detail::fisher_yates(ids, shuffler);

        std::vector<std::string> src, tgt;
        std::set<std::pair<std::size_t, std::size_t>> links;
        for (std::size_t i = 0; i < len; ++i) {
            src.push_back("w" + std::to_string(ids[i]));
            if (rand.chance(0.10)) {
                tgt.push_back("noise" + std::to_string(rand.below(10)));
            } else {
                tgt.push_back("v" + std::to_string(ids[i]));
                links.emplace(i, i);
            }
        }
        gold.push_back(std::move(links));
        sentences.emplace_back(src, tgt);
        rev_bitext.emplace_back(tgt, src);
        fwd_bitext.emplace_back(std::move(src), std::move(tgt));
    }

    const auto fwd = train_model1(fwd_bitext, 5);
    const auto rev = train_model1(rev_bitext, 5);

    for (const auto& table : {&fwd, &rev}) {
        const auto& ll = table->iteration_loglik();
        for (std::size_t k = 1; k < ll.size(); ++k)
            c.check(ll[k] >= ll[k - 1] - 1e-6, "log-likelihood decreased at iteration " +
                                                   std::to_string(k + 1));
    }

    std::size_t gold_total = 0, recovered = 0;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto& [src, tgt] = sentences[s];
        AlignmentSet f = align_pair(fwd, src, tgt, std::to_string(s));
        AlignmentSet r = align_pair(rev, tgt, src, std::to_string(s));
        std::set<std::pair<std::size_t, std::size_t>> flipped;
        for (const auto& [j, i] : r.links) flipped.emplace(i, j);
        r.links = std::move(flipped);
        const auto inter = symmetrize(f, r, SymHeuristic::intersection);
        gold_total += gold[s].size();
        for (const auto& link : gold[s])
            if (inter.links.count(link)) ++recovered;
    }
    const double recall = static_cast<double>(recovered) / static_cast<double>(gold_total);
    c.check(recall >= 0.95, "gold link recall " + std::to_string(recall) + " < 0.95");
    c.require_under_seconds(10.0);
}

// --- 6: oracle equivalence for chrf and unigram precision --------------------

void criterion_oracle_equivalence() {
    Criterion c(6, "chrf-uniprec-oracle-equivalence");
    testutil::Rand rand(3333);
    for (int round = 0; round < 500; ++round) {
        std::string ref = rand.unicode_word(1, 9);
        std::string hyp = rand.chance(0.1) ? "" : rand.unicode_word(1, 9);
        if (rand.chance(0.5)) ref += " " + rand.unicode_word(1, 5);
        if (rand.chance(0.4)) hyp += (hyp.empty() ? "" : " ") + rand.unicode_word(1, 5);
        if (rand.chance(0.3)) hyp = ref;
        const double got = chrf_span(ref, hyp);
        const double want = oracle::chrf(ref, hyp);
        c.check(std::abs(got - want) <= 1e-12,
                "chrf mismatch on (" + ref + ", " + hyp + "): " + std::to_string(got) + " vs " +
                    std::to_string(want));

        std::vector<std::string> ref_words, hyp_words;
        for (std::size_t k = 0; k < 1 + rand.below(6); ++k)
            ref_words.push_back("w" + std::to_string(rand.below(8)));
        for (std::size_t k = 0; k < rand.below(6); ++k)
            hyp_words.push_back("w" + std::to_string(rand.below(8)));
        const double up = unigram_precision(ref_words, hyp_words);
        const double up_want = oracle::unigram_precision(ref_words, hyp_words);
        c.check(std::abs(up - up_want) <= 1e-12, "uniprec mismatch");
    }
}

// --- 7: empty-alignment diagnostics ------------------------------------------

void criterion_empty_alignment_rate() {
    Criterion c(7, "empty-alignment-rate");
    std::vector<AnnotatedPair> pairs;
    std::map<std::string, AlignmentSet> ref_align, hyp_align;
    std::map<std::string, std::string> hyps;
    for (int k = 0; k < 45; ++k) {
        const std::string id = "p" + std::to_string(k);
        pairs.push_back(
            make_annotated_pair(id, "the idiom sign", "le mot juste", {{"idiom", 1, 2, 0, 0}}));
        hyps[id] = "le mot juste";
        AlignmentSet a;
        a.pair_id = id;
        // pair p0: nothing aligns to the span on the reference side
        a.links = k == 0 ? std::set<std::pair<std::size_t, std::size_t>>{{0, 0}}
                         : std::set<std::pair<std::size_t, std::size_t>>{{1, 1}};
        ref_align[id] = a;
        AlignmentSet h;
        h.pair_id = id;
        h.links = {{1, 1}};
        hyp_align[id] = h;
    }
    const auto result = apt_corpus(pairs, ref_align, hyp_align, hyps);
    c.check(result.evaluated_pairs == 45, "expected 45 evaluated pairs");
    c.check(result.empty_ref_count == 1, "expected exactly 1 empty reference projection");
    c.check(result.empty_ref_rate == 1.0 / 45.0, "empty rate != 1/45");
    c.check(std::abs(result.empty_ref_rate - 0.022) < 5e-4, "empty rate not ~2.2%");
}

// --- 8: split protocol over a fuzzed corpus ----------------------------------

void criterion_split_protocol() {
    Criterion c(8, "split-protocol");
    testutil::Rand rand(4444);
    std::vector<AnnotatedPair> pairs;
    std::map<std::string, std::size_t> expected_counts;
    std::size_t pair_no = 0;
    // 120 idioms with zipf-ish frequencies, the rest regular, 10k total
    for (int k = 0; k < 120; ++k) {
        const std::string idiom = "idiom_" + std::to_string(k);
        const std::size_t occurrences = 1 + rand.below(1 + 300 / (k + 1));
        expected_counts[idiom] = occurrences;
        for (std::size_t o = 0; o < occurrences; ++o) {
            const std::string id = "p" + std::to_string(pair_no++);
            pairs.push_back(
                make_annotated_pair(id, "x " + idiom + " y", "t", {{idiom, 1, 2, 0, 0}}));
        }
    }
    while (pairs.size() < 10000) {
        const std::string id = "p" + std::to_string(pair_no++);
        pairs.push_back(make_annotated_pair(id, "regular text", "t"));
    }

    const auto joint = build_split(pairs, SplitKind::joint, 1, 99);
    const auto zero = build_split(pairs, SplitKind::zero, 1, 99);
    const auto upsample = build_split(pairs, SplitKind::upsample, 20, 99);

    // recover per-idiom train/test counts from the manifest
    std::map<std::string, std::string> idiom_of;
    for (const auto& p : pairs)
        if (p.has_idiom()) idiom_of[p.pair_id] = p.spans[0].idiom_id;
    std::map<std::string, std::size_t> train_n, test_n;
    for (const auto& id : joint.idiom_train_ids) ++train_n[idiom_of[id]];
    for (const auto& id : joint.idiom_test_ids) ++test_n[idiom_of[id]];

    for (const auto& [idiom, n] : expected_counts) {
        if (n == 1) {
            c.check(train_n.count(idiom) == 0 && test_n.count(idiom) == 0,
                    idiom + ": singleton not discarded");
            continue;
        }
        c.check(train_n[idiom] == n / 2,
                idiom + ": train " + std::to_string(train_n[idiom]) + " != floor(n/2)");
        c.check(test_n[idiom] == n - n / 2,
                idiom + ": test " + std::to_string(test_n[idiom]) + " != ceil(n/2)");
    }

    // id lists pairwise disjoint
    std::set<std::string> train_set(joint.idiom_train_ids.begin(), joint.idiom_train_ids.end());
    std::set<std::string> test_set(joint.idiom_test_ids.begin(), joint.idiom_test_ids.end());
    std::set<std::string> regular_set(joint.regular_ids.begin(), joint.regular_ids.end());
    bool disjoint = true;
    for (const auto& id : train_set)
        if (test_set.count(id) || regular_set.count(id)) disjoint = false;
    for (const auto& id : test_set)
        if (regular_set.count(id)) disjoint = false;
    c.check(disjoint, "id lists overlap");

    // listing contracts
    std::map<std::string, int> zero_listing, joint_listing, upsample_listing;
    for (const auto& id : zero.training_listing()) ++zero_listing[id];
    for (const auto& id : joint.training_listing()) ++joint_listing[id];
    for (const auto& id : upsample.training_listing()) ++upsample_listing[id];
    bool zero_ok = true;
    for (const auto& id : zero.idiom_train_ids)
        if (zero_listing.count(id)) zero_ok = false;
    c.check(zero_ok, "zero listing contains idiom pairs");
    c.check(zero_listing.size() == zero.regular_ids.size(), "zero listing size mismatch");
    bool joint_ok = true;
    for (const auto& id : joint.idiom_train_ids)
        if (joint_listing[id] != 1) joint_ok = false;
    c.check(joint_ok, "joint listing repeat != 1");
    bool upsample_ok = true;
    for (const auto& id : upsample.idiom_train_ids)
        if (upsample_listing[id] != 20) upsample_ok = false;
    for (const auto& id : upsample.regular_ids)
        if (upsample_listing[id] != 1) upsample_ok = false;
    c.check(upsample_ok, "upsample listing repeats wrong");

    // idiom-test pairs never appear in any training listing
    bool test_clean = true;
    for (const auto& id : upsample.idiom_test_ids)
        if (upsample_listing.count(id)) test_clean = false;
    c.check(test_clean, "idiom-test pairs leak into training listing");
}

// --- 9: byte-identical reports through the command line ----------------------

void criterion_cli_determinism() {
    Criterion c(9, "cli-determinism");
    testutil::TempDir dir("accept_cli");

    std::ostringstream corpus;
    write_corpus(fixtures::litter_pairs(), corpus);
    const auto corpus_path = dir.file("corpus.jsonl", corpus.str());

    std::string hyp_text;
    for (const auto& f : fixtures::litter_cases()) hyp_text += f.hypothesis + "\n";
    const auto hyp_path = dir.file("hyp.txt", hyp_text);

    std::ostringstream lex_stream;
    fixtures::litter_lexicon().save(lex_stream);
    const auto lex_path = dir.file("dict.txt", lex_stream.str());

    const std::string base = std::string(IDIOMEVAL_CLI_PATH) + " eval --corpus " + corpus_path +
                             " --hyp " + hyp_path + " --lexicon " + lex_path +
                             " --train-aligner --metrics litter,apt,bleu,chrf --out ";
    const auto r1 = dir.path("report1.jsonl");
    const auto r2 = dir.path("report2.jsonl");
    const int rc1 = std::system((base + r1 + " 2>/dev/null >/dev/null").c_str());
    const int rc2 = std::system((base + r2 + " 2>/dev/null >/dev/null").c_str());
    c.check(rc1 == 0 && rc2 == 0, "eval runs failed");
    const std::string b1 = testutil::slurp(r1);
    const std::string b2 = testutil::slurp(r2);
    c.check(!b1.empty(), "empty report");
    c.check(b1 == b2, "reports differ between runs");
}

}  // namespace

int main() {
    criterion_worked_examples();
    criterion_self_translation_zero();
    criterion_macro_micro_separation();
    criterion_matcher_demo();
    criterion_aligner_sanity();
    criterion_oracle_equivalence();
    criterion_empty_alignment_rate();
    criterion_split_protocol();
    criterion_cli_determinism();
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
