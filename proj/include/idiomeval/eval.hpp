#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idiomeval/aligner.hpp"
#include "idiomeval/apt_eval.hpp"
#include "idiomeval/corpus.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/lexicon.hpp"
#include "idiomeval/litter.hpp"
#include "idiomeval/matcher.hpp"
#include "idiomeval/metrics.hpp"
#include "idiomeval/report.hpp"

namespace idiomeval {

enum class HypothesisFormat { auto_detect, plain, keyed };

/// Hypothesis files come either as plain text (one translation per line, in
/// corpus order) or keyed records {"pair_id": ..., "text": ...} per line.
inline std::map<std::string, std::string> load_hypotheses(const std::string& path,
                                                          const std::vector<AnnotatedPair>& pairs,
                                                          HypothesisFormat format =
                                                              HypothesisFormat::auto_detect) {
    const std::vector<std::string> lines = read_lines(path);
    if (format == HypothesisFormat::auto_detect) {
        format = HypothesisFormat::plain;
        for (const auto& line : lines) {
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (!j.is_discarded() && j.is_object() && j.contains("pair_id") && j.contains("text"))
                format = HypothesisFormat::keyed;
            break;
        }
    }
    std::map<std::string, std::string> hyps;
    if (format == HypothesisFormat::keyed) {
        std::size_t line_no = 0;
        for (const auto& line : lines) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("pair_id") ||
                !j.contains("text") || !j["pair_id"].is_string() || !j["text"].is_string())
                throw input_error("hypothesis line " + std::to_string(line_no) +
                                  ": malformed keyed record");
            hyps[j["pair_id"].get<std::string>()] = j["text"].get<std::string>();
        }
        return hyps;
    }
    if (lines.size() != pairs.size())
        throw input_error("hypothesis count (" + std::to_string(lines.size()) +
                          ") does not match corpus size (" + std::to_string(pairs.size()) + ")");
    for (std::size_t k = 0; k < lines.size(); ++k) hyps[pairs[k].pair_id] = lines[k];
    return hyps;
}

struct EvalOptions {
    bool litter = true;
    bool apt = true;
    bool bleu = true;
    bool chrf = true;
    // in-process aligner settings, used when alignment files are not given
    bool train_aligner = false;
    bool diag_prior = true;
    int iterations = 5;
    double alpha = 0.01;
    double lambda = 4.0;
    SymHeuristic heuristic = SymHeuristic::grow_diag_final_and;
};

namespace detail {

inline std::vector<std::string> normalized_surfaces(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.normalized);
    return out;
}

// Trains forward/reverse tables on the corpus (source vs reference) and
// produces symmetrized source-reference and source-hypothesis alignments
// for every annotated pair.
inline void train_and_align(const std::vector<AnnotatedPair>& pairs,
                            const std::map<std::string, std::string>& hypotheses,
                            const EvalOptions& opts,
                            std::map<std::string, AlignmentSet>& ref_out,
                            std::map<std::string, AlignmentSet>& hyp_out) {
    std::vector<SentencePair> fwd_bitext, rev_bitext;
    fwd_bitext.reserve(pairs.size());
    rev_bitext.reserve(pairs.size());
    for (const auto& p : pairs) {
        auto src = normalized_surfaces(p.source_tokens);
        auto tgt = normalized_surfaces(p.target_tokens);
        rev_bitext.emplace_back(tgt, src);
        fwd_bitext.emplace_back(std::move(src), std::move(tgt));
    }
    const double lambda = opts.diag_prior ? opts.lambda : 0.0;
    const TranslationTable fwd = train_aligner(fwd_bitext, opts.iterations, opts.alpha, lambda);
    const TranslationTable rev = train_aligner(rev_bitext, opts.iterations, opts.alpha, lambda);

    auto symmetrized = [&](const std::vector<std::string>& src,
                           const std::vector<std::string>& tgt, const std::string& id) {
        AlignmentSet f = align_pair(fwd, src, tgt, id);
        AlignmentSet r = align_pair(rev, tgt, src, id);
        r.direction = AlignDirection::tgt_to_src;
        std::set<std::pair<std::size_t, std::size_t>> flipped;
        for (const auto& [j, i] : r.links) flipped.emplace(i, j);
        r.links = std::move(flipped);
        return symmetrize(f, r, opts.heuristic);
    };

    for (const auto& p : pairs) {
        if (!p.has_idiom()) continue;
        const auto src = normalized_surfaces(p.source_tokens);
        ref_out.emplace(p.pair_id,
                        symmetrized(src, normalized_surfaces(p.target_tokens), p.pair_id));
        const auto hyp_it = hypotheses.find(p.pair_id);
        if (hyp_it == hypotheses.end())
            throw input_error("missing hypothesis for pair " + p.pair_id);
        hyp_out.emplace(p.pair_id,
                        symmetrized(src, normalized_surfaces(tokenize(hyp_it->second)), p.pair_id));
    }
}

}  // namespace detail

/// Runs every requested metric over an annotated corpus and its hypotheses.
/// APT needs reference- and hypothesis-side alignments: pass both maps, or
/// set `train_aligner` to fit the built-in aligner on the corpus itself.
inline EvalReport run_eval(const std::vector<AnnotatedPair>& pairs,
                           const std::map<std::string, std::string>& hypotheses,
                           const BilingualLexicon* lexicon,
                           const std::map<std::string, AlignmentSet>* ref_alignments,
                           const std::map<std::string, AlignmentSet>* hyp_alignments,
                           const EvalOptions& opts) {
    EvalReport report;
    report.pair_count = pairs.size();
    for (const auto& p : pairs)
        if (p.has_idiom()) ++report.annotated_count;

    if (opts.litter) {
        if (lexicon == nullptr) throw input_error("litter requires a bilingual dictionary");
        report.litter = litter_corpus(pairs, hypotheses, *lexicon);
    }
    if (opts.apt) {
        std::map<std::string, AlignmentSet> trained_ref, trained_hyp;
        if (opts.train_aligner) {
            detail::train_and_align(pairs, hypotheses, opts, trained_ref, trained_hyp);
            ref_alignments = &trained_ref;
            hyp_alignments = &trained_hyp;
        }
        if (ref_alignments == nullptr || hyp_alignments == nullptr)
            throw input_error(
                "apt requires reference and hypothesis alignments (or the in-process aligner)");
        report.apt = apt_corpus(pairs, *ref_alignments, *hyp_alignments, hypotheses);
    }
    if (opts.bleu || opts.chrf) {
        std::vector<std::string> hyps, refs;
        hyps.reserve(pairs.size());
        refs.reserve(pairs.size());
        for (const auto& p : pairs) {
            const auto it = hypotheses.find(p.pair_id);
            if (it == hypotheses.end())
                throw input_error("missing hypothesis for pair " + p.pair_id);
            hyps.push_back(it->second);
            refs.push_back(p.target_raw);
        }
        if (opts.bleu) report.bleu = corpus_bleu(hyps, refs);
        if (opts.chrf) report.chrf = corpus_chrf(hyps, refs);
    }
    return report;
}

}  // namespace idiomeval
