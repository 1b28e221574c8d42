#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "idiomeval/aligner.hpp"
#include "idiomeval/corpus.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/normalize.hpp"
#include "idiomeval/tokenize.hpp"

namespace idiomeval {

/// Target-side words aligned to an idiom source span.
struct SpanProjection {
    std::string pair_id;
    std::vector<std::size_t> target_indices;  // sorted, deduplicated
    std::vector<std::string> target_words;    // tokens at those indices
    bool empty = true;
};

/// Projects a source span through an alignment onto the target side:
/// every target index linked to a span token. An untouched span yields an
/// empty projection, which callers count and score as 0.
inline SpanProjection project_span(const IdiomSpan& span, const AlignmentSet& alignment,
                                   const std::vector<Token>& target_tokens) {
    SpanProjection proj;
    proj.pair_id = alignment.pair_id;
    std::set<std::size_t> indices;
    for (const auto& [i, j] : alignment.links) {
        if (i >= span.token_start && i < span.token_end) {
            if (j >= target_tokens.size())
                throw input_error("alignment for pair " + alignment.pair_id +
                                  " links past the target sentence");
            indices.insert(j);
        }
    }
    proj.target_indices.assign(indices.begin(), indices.end());
    for (std::size_t j : proj.target_indices) proj.target_words.push_back(target_tokens[j].surface);
    proj.empty = proj.target_indices.empty();
    return proj;
}

/// Share of distinct normalized reference words that occur among the
/// hypothesis words.
inline double unigram_precision(const std::vector<std::string>& ref_words,
                                const std::vector<std::string>& hyp_words) {
    std::set<std::string> ref;
    for (const auto& w : ref_words) ref.insert(normalize(w));
    if (ref.empty()) throw input_error("unigram precision over an empty reference span");
    std::set<std::string> hyp;
    for (const auto& w : hyp_words) hyp.insert(normalize(w));
    std::size_t found = 0;
    for (const auto& w : ref)
        if (hyp.count(w)) ++found;
    return static_cast<double>(found) / static_cast<double>(ref.size());
}

namespace detail {

// character n-grams with whitespace removed; keys are code point sequences
using CharNgramCounts = std::map<std::u32string, std::size_t>;

inline std::u32string strip_whitespace_chars(std::string_view text) {
    std::u32string out;
    for (char32_t cp : decode_utf8(text))
        if (!is_space(cp)) out.push_back(cp);
    return out;
}

inline CharNgramCounts char_ngrams(const std::u32string& chars, std::size_t n) {
    CharNgramCounts counts;
    if (chars.size() < n) return counts;
    for (std::size_t i = 0; i + n <= chars.size(); ++i) ++counts[chars.substr(i, n)];
    return counts;
}

inline std::size_t total_count(const CharNgramCounts& c) {
    std::size_t n = 0;
    for (const auto& [k, v] : c) n += v;
    return n;
}

inline std::size_t overlap_count(const CharNgramCounts& a, const CharNgramCounts& b) {
    std::size_t n = 0;
    for (const auto& [k, v] : a) {
        const auto it = b.find(k);
        if (it != b.end()) n += std::min(v, it->second);
    }
    return n;
}

struct ChrfOrderStats {
    std::size_t matched = 0;
    std::size_t hyp_total = 0;
    std::size_t ref_total = 0;
};

inline void accumulate_chrf(std::vector<ChrfOrderStats>& stats, std::string_view ref_text,
                            std::string_view hyp_text, std::size_t n_max) {
    const std::u32string ref = strip_whitespace_chars(ref_text);
    const std::u32string hyp = strip_whitespace_chars(hyp_text);
    stats.resize(std::max(stats.size(), n_max));
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto rc = char_ngrams(ref, n);
        const auto hc = char_ngrams(hyp, n);
        stats[n - 1].matched += overlap_count(rc, hc);
        stats[n - 1].ref_total += total_count(rc);
        stats[n - 1].hyp_total += total_count(hc);
    }
}

// F_beta averaged over n-gram orders; orders without reference n-grams are
// skipped. Empty hypothesis sides score 0 at every remaining order.
inline double chrf_from_stats(const std::vector<ChrfOrderStats>& stats, double beta) {
    const double beta2 = beta * beta;
    double sum = 0.0;
    std::size_t orders = 0;
    for (const auto& s : stats) {
        if (s.ref_total == 0) continue;
        ++orders;
        if (s.hyp_total == 0 || s.matched == 0) continue;
        const double precision = static_cast<double>(s.matched) / s.hyp_total;
        const double recall = static_cast<double>(s.matched) / s.ref_total;
        sum += (1.0 + beta2) * precision * recall / (beta2 * precision + recall);
    }
    return orders == 0 ? 0.0 : sum / static_cast<double>(orders);
}

}  // namespace detail

/// Character n-gram F-score between two texts, orders 1..n_max averaged,
/// recall-weighted with `beta`. Whitespace never enters an n-gram.
inline double chrf_span(std::string_view ref_text, std::string_view hyp_text,
                        std::size_t n_max = 6, double beta = 2.0) {
    if (detail::strip_whitespace_chars(ref_text).empty())
        throw input_error("chrf over an empty reference");
    std::vector<detail::ChrfOrderStats> stats;
    detail::accumulate_chrf(stats, ref_text, hyp_text, n_max);
    return detail::chrf_from_stats(stats, beta);
}

// ---------------------------------------------------------------------------
// corpus-level APT evaluation

struct AptScore {
    std::string pair_id;
    std::string idiom_id;
    std::optional<double> uniprec;  // unset when a projection was empty
    std::optional<double> chrf;
    bool empty_ref = false;
    bool empty_hyp = false;
    bool multi_idiom = false;

    double uniprec_or_zero() const { return uniprec.value_or(0.0); }
    double chrf_or_zero() const { return chrf.value_or(0.0); }
};

struct PerIdiomApt {
    std::size_t evaluated = 0;
    double uniprec_sum = 0.0;
    double chrf_sum = 0.0;

    double uniprec() const { return evaluated == 0 ? 0.0 : uniprec_sum / evaluated; }
    double chrf() const { return evaluated == 0 ? 0.0 : chrf_sum / evaluated; }
};

struct AptResult {
    double macro_uniprec = 0.0;
    double micro_uniprec = 0.0;
    double macro_chrf = 0.0;
    double micro_chrf = 0.0;
    std::size_t evaluated_pairs = 0;
    std::size_t empty_ref_count = 0;
    std::size_t empty_hyp_count = 0;
    double empty_ref_rate = 0.0;
    double empty_hyp_rate = 0.0;
    std::map<std::string, PerIdiomApt> per_idiom;
    std::vector<AptScore> scores;  // corpus order
};

inline std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

/// Projects every annotated pair's first span onto the reference and the
/// hypothesis, scores the projections with unigram precision and ChrF, and
/// macro-averages per idiom. Empty projections score 0, stay in the
/// denominators and are reported as empty rates.
inline AptResult apt_corpus(const std::vector<AnnotatedPair>& pairs,
                            const std::map<std::string, AlignmentSet>& ref_alignments,
                            const std::map<std::string, AlignmentSet>& hyp_alignments,
                            const std::map<std::string, std::string>& hypotheses) {
    AptResult result;
    double uniprec_total = 0.0;
    double chrf_total = 0.0;

    for (const auto& pair : pairs) {
        if (!pair.has_idiom()) continue;
        const auto ref_it = ref_alignments.find(pair.pair_id);
        const auto hyp_it = hyp_alignments.find(pair.pair_id);
        const auto text_it = hypotheses.find(pair.pair_id);
        if (ref_it == ref_alignments.end() || hyp_it == hyp_alignments.end())
            throw input_error("missing alignment for pair " + pair.pair_id);
        if (text_it == hypotheses.end())
            throw input_error("missing hypothesis for pair " + pair.pair_id);

        const IdiomSpan& span = pair.spans.front();
        const std::vector<Token> hyp_tokens = tokenize(text_it->second);

        AptScore score;
        score.pair_id = pair.pair_id;
        score.idiom_id = span.idiom_id;
        score.multi_idiom = [&] {
            std::set<std::string> ids;
            for (const auto& s : pair.spans) ids.insert(s.idiom_id);
            return ids.size() > 1;
        }();

        const SpanProjection ref_proj = project_span(span, ref_it->second, pair.target_tokens);
        const SpanProjection hyp_proj = project_span(span, hyp_it->second, hyp_tokens);
        score.empty_ref = ref_proj.empty;
        score.empty_hyp = hyp_proj.empty;
        if (!ref_proj.empty && !hyp_proj.empty) {
            score.uniprec = unigram_precision(ref_proj.target_words, hyp_proj.target_words);
            score.chrf = chrf_span(join_words(ref_proj.target_words),
                                   join_words(hyp_proj.target_words));
        }

        ++result.evaluated_pairs;
        if (score.empty_ref) ++result.empty_ref_count;
        if (score.empty_hyp) ++result.empty_hyp_count;
        uniprec_total += score.uniprec_or_zero();
        chrf_total += score.chrf_or_zero();
        auto& per = result.per_idiom[score.idiom_id];
        ++per.evaluated;
        per.uniprec_sum += score.uniprec_or_zero();
        per.chrf_sum += score.chrf_or_zero();
        result.scores.push_back(std::move(score));
    }

    if (!result.per_idiom.empty()) {
        double up = 0.0, cf = 0.0;
        for (const auto& [idiom, per] : result.per_idiom) {
            up += per.uniprec();
            cf += per.chrf();
        }
        result.macro_uniprec = up / static_cast<double>(result.per_idiom.size());
        result.macro_chrf = cf / static_cast<double>(result.per_idiom.size());
    }
    if (result.evaluated_pairs > 0) {
        result.micro_uniprec = uniprec_total / static_cast<double>(result.evaluated_pairs);
        result.micro_chrf = chrf_total / static_cast<double>(result.evaluated_pairs);
        result.empty_ref_rate =
            static_cast<double>(result.empty_ref_count) / result.evaluated_pairs;
        result.empty_hyp_rate =
            static_cast<double>(result.empty_hyp_count) / result.evaluated_pairs;
    }
    return result;
}

}  // namespace idiomeval
