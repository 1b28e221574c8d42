#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "idiomeval/apt_eval.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/tokenize.hpp"

namespace idiomeval {

inline constexpr std::size_t kBleuMaxOrder = 4;

/// Clipped n-gram match statistics for BLEU; a commutative monoid under +.
struct BleuStats {
    std::array<std::size_t, kBleuMaxOrder> matches{};
    std::array<std::size_t, kBleuMaxOrder> totals{};
    std::size_t hyp_length = 0;
    std::size_t ref_length = 0;

    BleuStats& operator+=(const BleuStats& o) {
        for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
            matches[n] += o.matches[n];
            totals[n] += o.totals[n];
        }
        hyp_length += o.hyp_length;
        ref_length += o.ref_length;
        return *this;
    }
};

namespace detail {

using WordNgramCounts = std::map<std::vector<std::string>, std::size_t>;

inline WordNgramCounts word_ngrams(const std::vector<std::string>& words, std::size_t n) {
    WordNgramCounts counts;
    if (words.size() < n) return counts;
    for (std::size_t i = 0; i + n <= words.size(); ++i)
        ++counts[std::vector<std::string>(words.begin() + static_cast<std::ptrdiff_t>(i),
                                          words.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return counts;
}

inline std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.surface);
    return out;
}

}  // namespace detail

inline BleuStats bleu_stats(const std::vector<std::string>& hyp,
                            const std::vector<std::string>& ref) {
    BleuStats s;
    s.hyp_length = hyp.size();
    s.ref_length = ref.size();
    for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
        const auto hc = detail::word_ngrams(hyp, n);
        const auto rc = detail::word_ngrams(ref, n);
        for (const auto& [gram, count] : hc) {
            s.totals[n - 1] += count;
            const auto it = rc.find(gram);
            if (it != rc.end()) s.matches[n - 1] += std::min(count, it->second);
        }
    }
    return s;
}

inline double brevity_penalty(std::size_t hyp_length, std::size_t ref_length) {
    if (hyp_length == 0) return 0.0;
    if (hyp_length >= ref_length) return 1.0;
    return std::exp(1.0 - static_cast<double>(ref_length) / static_cast<double>(hyp_length));
}

/// Corpus BLEU in [0,100]: geometric mean of clipped n-gram precisions on
/// pooled counts times the brevity penalty, no smoothing. Orders the
/// hypothesis corpus is too short to produce are left out of the mean; an
/// order with zero matches zeroes the score.
inline double bleu_from_stats(const BleuStats& s) {
    double log_sum = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 0; n < kBleuMaxOrder; ++n) {
        if (s.totals[n] == 0) continue;
        if (s.matches[n] == 0) return 0.0;
        log_sum += std::log(static_cast<double>(s.matches[n]) / s.totals[n]);
        ++orders;
    }
    if (orders == 0) return 0.0;
    return 100.0 * brevity_penalty(s.hyp_length, s.ref_length) *
           std::exp(log_sum / static_cast<double>(orders));
}

inline double corpus_bleu(const std::vector<std::string>& hyps,
                          const std::vector<std::string>& refs) {
    if (hyps.size() != refs.size()) throw input_error("corpus_bleu: hypothesis/reference count mismatch");
    BleuStats total;
    bool any_ref = false;
    for (std::size_t k = 0; k < hyps.size(); ++k) {
        const auto hyp = detail::surfaces(tokenize(hyps[k]));
        const auto ref = detail::surfaces(tokenize(refs[k]));
        if (!ref.empty()) any_ref = true;
        total += bleu_stats(hyp, ref);
    }
    if (!any_ref) throw input_error("corpus_bleu: all references are empty");
    return bleu_from_stats(total);
}

/// Sentence BLEU with add-1 smoothing of the n >= 2 precisions so short
/// sentences stay scorable; unigram precision is unsmoothed.
inline double sentence_bleu(std::string_view hyp, std::string_view ref) {
    const auto ref_words = detail::surfaces(tokenize(ref));
    if (ref_words.empty()) throw input_error("sentence_bleu: empty reference");
    const auto hyp_words = detail::surfaces(tokenize(hyp));
    if (hyp_words.empty()) return 0.0;
    const BleuStats s = bleu_stats(hyp_words, ref_words);
    if (s.matches[0] == 0) return 0.0;
    double log_sum = std::log(static_cast<double>(s.matches[0]) / s.totals[0]);
    for (std::size_t n = 1; n < kBleuMaxOrder; ++n)
        log_sum += std::log(static_cast<double>(s.matches[n] + 1) / (s.totals[n] + 1));
    return 100.0 * brevity_penalty(s.hyp_length, s.ref_length) *
           std::exp(log_sum / static_cast<double>(kBleuMaxOrder));
}

/// Corpus ChrF: character n-gram counts pooled over the corpus before the
/// F-score (not the mean of per-sentence scores); parameters match
/// chrf_span.
inline double corpus_chrf(const std::vector<std::string>& hyps,
                          const std::vector<std::string>& refs, std::size_t n_max = 6,
                          double beta = 2.0) {
    if (hyps.size() != refs.size()) throw input_error("corpus_chrf: hypothesis/reference count mismatch");
    std::vector<detail::ChrfOrderStats> stats;
    for (std::size_t k = 0; k < hyps.size(); ++k)
        detail::accumulate_chrf(stats, refs[k], hyps[k], n_max);
    return detail::chrf_from_stats(stats, beta);
}

}  // namespace idiomeval
