// idiomeval command line: extract -> split -> align -> eval -> report.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idiomeval/idiomeval.hpp"

namespace {

using namespace idiomeval;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    return out;
}

Lemmatizer lemmatizer_for(const std::string& path) {
    return path.empty() ? builtin_lemmatizer() : Lemmatizer::load(path);
}

void write_frequency_table(const std::vector<std::pair<std::string, std::size_t>>& table,
                           std::ostream& out) {
    out << "idiom\tcount\n";
    for (const auto& [idiom, count] : table) out << idiom << '\t' << count << '\n';
}

// --- extract ---------------------------------------------------------------

struct ExtractArgs {
    std::string idioms, source, target, out, stats, lemmas;
};

void run_extract(const ExtractArgs& a) {
    const auto phrases = load_idiom_list(a.idioms);
    if (phrases.empty()) throw input_error("idiom list is empty: " + a.idioms);
    const auto lemmas = lemmatizer_for(a.lemmas);
    // inputs are fully read and validated before any output file is created
    const auto result = extract_corpus(phrases, read_lines(a.source), read_lines(a.target), lemmas);
    auto out = open_output(a.out);
    write_corpus(result.pairs, out);
    auto stats = open_output(a.stats.empty() ? a.out + ".stats.tsv" : a.stats);
    write_frequency_table(result.frequency_table, stats);
    std::cerr << "extracted " << result.pairs.size() << " annotated pair(s)\n";
}

// --- split -----------------------------------------------------------------

struct SplitArgs {
    std::string corpus, kind = "joint", out, train_out, test_out;
    int factor = 1;
    std::uint64_t seed = 0;
};

void run_split(const SplitArgs& a) {
    const auto pairs = load_corpus(a.corpus);
    const SplitKind kind = split_kind_from_string(a.kind);
    if (kind == SplitKind::upsample && a.factor < 1)
        throw input_error("upsample factor must be >= 1");
    const SplitManifest manifest = build_split(pairs, kind, a.factor, a.seed);
    auto out = open_output(a.out);
    write_manifest(manifest, out);
    if (!a.train_out.empty()) {
        auto t = open_output(a.train_out);
        for (const auto& id : manifest.training_listing()) t << id << '\n';
    }
    if (!a.test_out.empty()) {
        auto t = open_output(a.test_out);
        for (const auto& id : manifest.idiom_test_ids) t << id << '\n';
    }
    std::cerr << "split: " << manifest.regular_ids.size() << " regular, "
              << manifest.idiom_train_ids.size() << " idiom-train, "
              << manifest.idiom_test_ids.size() << " idiom-test, "
              << manifest.discarded_singleton_ids.size() << " singleton(s) discarded\n";
}

// --- manifest-aware bitext loading ------------------------------------------

std::map<std::string, int> training_repeats(const std::string& manifest_path) {
    std::map<std::string, int> repeats;
    for (const auto& line : read_lines(manifest_path)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("pair_id")) continue;
        repeats[j["pair_id"].get<std::string>()] = j.value("repeat", 1);
    }
    if (repeats.empty()) throw input_error("manifest has no pair entries: " + manifest_path);
    return repeats;
}

std::vector<std::string> normalized_words(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.normalized);
    return out;
}

std::vector<SentencePair> corpus_bitext(const std::vector<AnnotatedPair>& pairs,
                                        const std::string& manifest_path, bool reverse) {
    std::map<std::string, int> repeats;
    if (!manifest_path.empty()) repeats = training_repeats(manifest_path);
    std::vector<SentencePair> bitext;
    for (const auto& p : pairs) {
        int repeat = 1;
        if (!manifest_path.empty()) {
            const auto it = repeats.find(p.pair_id);
            repeat = it == repeats.end() ? 0 : it->second;
        }
        auto src = normalized_words(p.source_tokens);
        auto tgt = normalized_words(p.target_tokens);
        if (reverse) std::swap(src, tgt);
        for (int k = 0; k < repeat; ++k) bitext.emplace_back(src, tgt);
    }
    return bitext;
}

// --- train-align -----------------------------------------------------------

struct TrainAlignArgs {
    std::string corpus, source, target, manifest, out, model = "diag";
    int iterations = 5;
    double alpha = 0.01;
    double lambda = 4.0;
    bool reverse = false;
};

std::vector<SentencePair> bitext_from_args(const std::string& corpus, const std::string& source,
                                           const std::string& target,
                                           const std::string& manifest, bool reverse) {
    if (!corpus.empty()) return corpus_bitext(load_corpus(corpus), manifest, reverse);
    if (source.empty() || target.empty())
        throw input_error("provide --corpus or both --source and --target");
    const auto src_lines = read_lines(source);
    const auto tgt_lines = read_lines(target);
    if (src_lines.size() != tgt_lines.size())
        throw input_error("parallel files differ in line count");
    std::vector<SentencePair> bitext;
    bitext.reserve(src_lines.size());
    for (std::size_t k = 0; k < src_lines.size(); ++k) {
        auto src = normalized_words(tokenize(src_lines[k]));
        auto tgt = normalized_words(tokenize(tgt_lines[k]));
        if (reverse) std::swap(src, tgt);
        bitext.emplace_back(std::move(src), std::move(tgt));
    }
    return bitext;
}

void run_train_align(const TrainAlignArgs& a) {
    const auto bitext = bitext_from_args(a.corpus, a.source, a.target, a.manifest, a.reverse);
    const double lambda = a.model == "model1" ? 0.0 : a.lambda;
    if (a.model != "model1" && a.model != "diag")
        throw input_error("unknown aligner model: " + a.model);
    const TranslationTable table = train_aligner(bitext, a.iterations, a.alpha, lambda);
    table.save(a.out);
    std::cerr << "trained on " << bitext.size() << " pair(s); log-likelihood per iteration:";
    for (double ll : table.iteration_loglik()) std::cerr << ' ' << ll;
    std::cerr << '\n';
}

// --- align -----------------------------------------------------------------

struct AlignArgs {
    std::string table, rev_table, corpus, source, target, out, sym = "grow-diag-final-and";
};

void run_align(const AlignArgs& a) {
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> sentences;
    if (!a.corpus.empty()) {
        for (const auto& p : load_corpus(a.corpus))
            sentences.emplace_back(normalized_words(p.source_tokens),
                                   normalized_words(p.target_tokens));
    } else {
        if (a.source.empty() || a.target.empty())
            throw input_error("provide --corpus or both --source and --target");
        const auto src_lines = read_lines(a.source);
        const auto tgt_lines = read_lines(a.target);
        if (src_lines.size() != tgt_lines.size())
            throw input_error("parallel files differ in line count");
        for (std::size_t k = 0; k < src_lines.size(); ++k)
            sentences.emplace_back(normalized_words(tokenize(src_lines[k])),
                                   normalized_words(tokenize(tgt_lines[k])));
    }

    const TranslationTable fwd = TranslationTable::load(a.table);
    std::optional<TranslationTable> rev;
    if (!a.rev_table.empty()) rev = TranslationTable::load(a.rev_table);
    const SymHeuristic heuristic = sym_heuristic_from_string(a.sym);

    std::vector<AlignmentSet> alignments;
    alignments.reserve(sentences.size());
    std::size_t line = 0;
    for (const auto& [src, tgt] : sentences) {
        const std::string id = std::to_string(++line);
        AlignmentSet f = align_pair(fwd, src, tgt, id);
        if (!rev) {
            alignments.push_back(std::move(f));
            continue;
        }
        AlignmentSet r = align_pair(*rev, tgt, src, id);
        r.direction = AlignDirection::tgt_to_src;
        std::set<std::pair<std::size_t, std::size_t>> flipped;
        for (const auto& [j, i] : r.links) flipped.emplace(i, j);
        r.links = std::move(flipped);
        alignments.push_back(symmetrize(f, r, heuristic));
    }
    write_pharaoh(alignments, a.out);
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string corpus, hyp, hyp_format = "auto", lexicon, ref_align, hyp_align, out;
    std::vector<std::string> metrics = {"litter", "apt", "bleu", "chrf"};
    std::string aligner_model = "diag", sym = "grow-diag-final-and";
    bool train = false;
    bool to_stdout = false;
    int iterations = 5;
    double alpha = 0.01;
    double lambda = 4.0;
};

HypothesisFormat hyp_format_from_string(const std::string& s) {
    if (s == "auto") return HypothesisFormat::auto_detect;
    if (s == "plain") return HypothesisFormat::plain;
    if (s == "keyed") return HypothesisFormat::keyed;
    throw input_error("unknown hypothesis format: " + s);
}

std::map<std::string, AlignmentSet> keyed_alignments(const std::string& path,
                                                     const std::vector<AnnotatedPair>& pairs) {
    const auto sets = read_pharaoh(path);
    if (sets.size() != pairs.size())
        throw input_error("alignment count (" + std::to_string(sets.size()) +
                          ") does not match corpus size (" + std::to_string(pairs.size()) + ")");
    std::map<std::string, AlignmentSet> out;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        AlignmentSet a = sets[k];
        a.pair_id = pairs[k].pair_id;
        out.emplace(pairs[k].pair_id, std::move(a));
    }
    return out;
}

void run_eval(const EvalArgs& a) {
    EvalOptions opts;
    opts.litter = opts.apt = opts.bleu = opts.chrf = false;
    for (const auto& metric : a.metrics) {
        if (metric == "litter")
            opts.litter = true;
        else if (metric == "apt")
            opts.apt = true;
        else if (metric == "bleu")
            opts.bleu = true;
        else if (metric == "chrf")
            opts.chrf = true;
        else if (!metric.empty())
            throw input_error("unknown metric: " + metric);
    }
    if (!opts.litter && !opts.apt && !opts.bleu && !opts.chrf)
        throw input_error("no metrics requested");
    opts.train_aligner = a.train;
    opts.diag_prior = a.aligner_model == "diag";
    if (a.aligner_model != "model1" && a.aligner_model != "diag")
        throw input_error("unknown aligner model: " + a.aligner_model);
    opts.iterations = a.iterations;
    opts.alpha = a.alpha;
    opts.lambda = a.lambda;
    opts.heuristic = sym_heuristic_from_string(a.sym);

    const auto pairs = load_corpus(a.corpus);
    const auto hypotheses = load_hypotheses(a.hyp, pairs, hyp_format_from_string(a.hyp_format));

    std::optional<BilingualLexicon> lexicon;
    if (!a.lexicon.empty()) lexicon = BilingualLexicon::load(a.lexicon);
    if (opts.litter && !lexicon) throw input_error("--metrics litter requires --lexicon");

    std::optional<std::map<std::string, AlignmentSet>> ref_align, hyp_align;
    if (opts.apt && !opts.train_aligner) {
        if (a.ref_align.empty() || a.hyp_align.empty())
            throw input_error("--metrics apt requires --ref-align and --hyp-align, or --train-aligner");
        ref_align = keyed_alignments(a.ref_align, pairs);
        hyp_align = keyed_alignments(a.hyp_align, pairs);
    }

    std::optional<std::ofstream> out;
    if (!a.out.empty()) out = open_output(a.out);  // fail fast before training

    const EvalReport report =
        idiomeval::run_eval(pairs, hypotheses, lexicon ? &*lexicon : nullptr,
                            ref_align ? &*ref_align : nullptr, hyp_align ? &*hyp_align : nullptr,
                            opts);
    if (out) report.write_jsonl(*out);
    if (a.to_stdout || a.out.empty()) report.write_jsonl(std::cout);
}

// --- eval-global -----------------------------------------------------------

struct EvalGlobalArgs {
    std::string hyp, ref, out;
};

void run_eval_global(const EvalGlobalArgs& a) {
    const auto hyps = read_lines(a.hyp);
    const auto refs = read_lines(a.ref);
    nlohmann::ordered_json j;
    j["bleu"] = corpus_bleu(hyps, refs);
    j["chrf"] = corpus_chrf(hyps, refs);
    if (!a.out.empty()) {
        auto out = open_output(a.out);
        out << j.dump() << '\n';
    } else {
        std::cout << j.dump() << '\n';
    }
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
    std::string in, tsv;
};

void run_report(const ReportArgs& a) {
    std::ifstream in(a.in, std::ios::binary);
    if (!in) throw input_error("cannot open report file: " + a.in);
    render_report_table(in, std::cout);
    if (!a.tsv.empty()) {
        std::ifstream again(a.in, std::ios::binary);
        auto out = open_output(a.tsv);
        render_report_tsv(again, out);
    }
}

// --- lexicon stats ---------------------------------------------------------

void run_lexicon_stats(const std::string& dict) {
    const BilingualLexicon lex = BilingualLexicon::load(dict);
    std::cout << "source_vocab_size\t" << lex.source_vocab_size() << '\n'
              << "pair_count\t" << lex.pair_count() << '\n'
              << "skipped_lines\t" << lex.skipped_lines() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Targeted evaluation toolkit for idiom translation"};
    app.require_subcommand(1);
    std::string version = std::string("idiomeval ") + std::string(kVersion) + " (corpus format " +
                          std::string(kCorpusFormatVersion) + ", report format " +
                          std::string(kReportFormatVersion) + ")";
    app.set_version_flag("--version", version);
    const char* config_env = std::getenv("IDIOMEVAL_CONFIG");
    app.set_config("--config", config_env ? config_env : "", "key = value config file");
    app.allow_config_extras(true);

    ExtractArgs extract;
    auto* cmd_extract = app.add_subcommand("extract", "annotate parallel text with idiom spans");
    cmd_extract->add_option("--idioms", extract.idioms, "idiom list, one phrase per line")->required();
    cmd_extract->add_option("--source", extract.source, "source-side text")->required();
    cmd_extract->add_option("--target", extract.target, "target-side text")->required();
    cmd_extract->add_option("--out", extract.out, "annotated corpus output")->required();
    cmd_extract->add_option("--stats", extract.stats, "frequency table output (default <out>.stats.tsv)");
    cmd_extract->add_option("--lemmas", extract.lemmas, "lemma lexicon (surface<TAB>lemma)");
    cmd_extract->callback([&] { run_extract(extract); });

    SplitArgs split;
    auto* cmd_split = app.add_subcommand("split", "build zero/joint/upsample training splits");
    cmd_split->add_option("--corpus", split.corpus, "annotated corpus")->required();
    cmd_split->add_option("--kind", split.kind, "zero | joint | upsample")->required();
    cmd_split->add_option("--factor", split.factor, "upsample factor");
    cmd_split->add_option("--seed", split.seed, "shuffle seed");
    cmd_split->add_option("--out", split.out, "manifest output")->required();
    cmd_split->add_option("--train-out", split.train_out, "expanded training id listing");
    cmd_split->add_option("--test-out", split.test_out, "idiom-test id listing");
    cmd_split->callback([&] { run_split(split); });

    TrainAlignArgs train_align;
    auto* cmd_train = app.add_subcommand("train-align", "train the statistical word aligner");
    cmd_train->add_option("--corpus", train_align.corpus, "annotated corpus");
    cmd_train->add_option("--source", train_align.source, "source-side text");
    cmd_train->add_option("--target", train_align.target, "target-side text");
    cmd_train->add_option("--manifest", train_align.manifest,
                          "split manifest; keeps pairs with repeat > 0, honoring repeats");
    cmd_train->add_option("--model", train_align.model, "model1 | diag");
    cmd_train->add_option("--iterations", train_align.iterations, "EM iterations");
    cmd_train->add_option("--alpha", train_align.alpha, "add-alpha smoothing");
    cmd_train->add_option("--lambda", train_align.lambda, "diagonal prior strength");
    cmd_train->add_flag("--reverse", train_align.reverse, "train target-to-source");
    cmd_train->add_option("--out", train_align.out, "translation table output")->required();
    cmd_train->callback([&] { run_train_align(train_align); });

    AlignArgs align;
    auto* cmd_align = app.add_subcommand("align", "Viterbi-align sentence pairs (Pharaoh output)");
    cmd_align->add_option("--table", align.table, "forward translation table")->required();
    cmd_align->add_option("--rev-table", align.rev_table, "reverse table (enables symmetrization)");
    cmd_align->add_option("--corpus", align.corpus, "annotated corpus");
    cmd_align->add_option("--source", align.source, "source-side text");
    cmd_align->add_option("--target", align.target, "target-side text");
    cmd_align->add_option("--sym", align.sym, "intersection | union | grow-diag-final-and");
    cmd_align->add_option("--out", align.out, "Pharaoh alignment output")->required();
    cmd_align->callback([&] { run_align(align); });

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "score hypotheses against an annotated corpus");
    cmd_eval->add_option("--corpus", eval.corpus, "annotated corpus")->required();
    cmd_eval->add_option("--hyp", eval.hyp, "hypothesis file")->required();
    cmd_eval->add_option("--hyp-format", eval.hyp_format, "auto | plain | keyed");
    cmd_eval->add_option("--lexicon", eval.lexicon, "bilingual dictionary (MUSE layout)");
    cmd_eval->add_option("--ref-align", eval.ref_align, "source-reference Pharaoh alignments");
    cmd_eval->add_option("--hyp-align", eval.hyp_align, "source-hypothesis Pharaoh alignments");
    cmd_eval->add_flag("--train-aligner", eval.train, "fit the built-in aligner on the corpus");
    cmd_eval->add_option("--aligner-model", eval.aligner_model, "model1 | diag");
    cmd_eval->add_option("--iterations", eval.iterations, "EM iterations");
    cmd_eval->add_option("--alpha", eval.alpha, "add-alpha smoothing");
    cmd_eval->add_option("--lambda", eval.lambda, "diagonal prior strength");
    cmd_eval->add_option("--sym", eval.sym, "symmetrization heuristic");
    cmd_eval->add_option("--metrics", eval.metrics, "comma list of litter,apt,bleu,chrf")
        ->delimiter(',');
    cmd_eval->add_option("--out", eval.out, "report output (line-delimited)");
    cmd_eval->add_flag("--stdout", eval.to_stdout, "also write the report to stdout");
    cmd_eval->callback([&] { run_eval(eval); });

    EvalGlobalArgs eval_global;
    auto* cmd_global = app.add_subcommand("eval-global", "corpus BLEU and ChrF for plain text files");
    cmd_global->add_option("--hyp", eval_global.hyp, "hypothesis file")->required();
    cmd_global->add_option("--ref", eval_global.ref, "reference file")->required();
    cmd_global->add_option("--out", eval_global.out, "output file (default stdout)");
    cmd_global->callback([&] { run_eval_global(eval_global); });

    ReportArgs report;
    auto* cmd_report = app.add_subcommand("report", "render a report as a table and TSV");
    cmd_report->add_option("--in", report.in, "report file from eval")->required();
    cmd_report->add_option("--tsv", report.tsv, "per-idiom TSV output");
    cmd_report->callback([&] { run_report(report); });

    std::string lexicon_dict;
    auto* cmd_lexicon = app.add_subcommand("lexicon", "dictionary utilities");
    cmd_lexicon->require_subcommand(1);
    auto* cmd_stats = cmd_lexicon->add_subcommand("stats", "print dictionary statistics");
    cmd_stats->add_option("--dict", lexicon_dict, "dictionary file")->required();
    cmd_stats->callback([&] { run_lexicon_stats(lexicon_dict); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const idiomeval::input_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
