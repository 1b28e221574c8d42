#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idiomeval/corpus.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/lexicon.hpp"
#include "idiomeval/tokenize.hpp"

namespace idiomeval {

/// Dictionary translations of one idiom source word: the candidate literal
/// translation errors for that word. Removal provenance is kept so reports
/// can explain why a candidate list no longer counts.
struct Blocklist {
    std::string source_word;             // normalized
    std::set<std::string> candidates;    // normalized target words
    bool removed_by_reference = false;
    std::optional<std::string> removing_word;
};

struct BlocklistSet {
    std::string pair_id;
    std::vector<Blocklist> blocklists;   // one per in-dictionary idiom word
    std::vector<std::string> oov_words;  // alphabetic span words missing from the dictionary

    std::size_t active_count() const {
        std::size_t n = 0;
        for (const auto& b : blocklists)
            if (!b.removed_by_reference) ++n;
        return n;
    }
};

struct LitterVerdict {
    std::string pair_id;
    bool triggered = false;
    // (hypothesis word, idiom source word), both normalized
    std::set<std::pair<std::string, std::string>> triggering_words;
    std::size_t active_blocklists = 0;

    std::set<std::string> triggering_hypothesis_words() const {
        std::set<std::string> out;
        for (const auto& [hyp, src] : triggering_words) out.insert(hyp);
        return out;
    }
};

/// One blocklist per alphabetic span token found in the dictionary;
/// punctuation and clitic tokens are skipped, out-of-vocabulary words are
/// recorded instead of producing a list.
inline BlocklistSet build_blocklists(const AnnotatedPair& pair, const IdiomSpan& span,
                                     const BilingualLexicon& lexicon) {
    if (span.token_start >= span.token_end || span.token_end > pair.source_tokens.size())
        throw input_error("pair " + pair.pair_id + ": span out of token range");
    BlocklistSet set;
    set.pair_id = pair.pair_id;
    for (std::size_t i = span.token_start; i < span.token_end; ++i) {
        const Token& tok = pair.source_tokens[i];
        if (!is_alphabetic_word(tok.surface)) continue;
        const auto& translations = lexicon.lookup(tok.normalized);
        if (translations.empty()) {
            set.oov_words.push_back(tok.normalized);
            continue;
        }
        Blocklist b;
        b.source_word = tok.normalized;
        b.candidates = translations;
        set.blocklists.push_back(std::move(b));
    }
    return set;
}

/// Reference filtering: any reference word found among a blocklist's
/// candidates removes that entire blocklist, so a synonym of the reference
/// wording can never trigger a false literal-translation error.
inline BlocklistSet filter_by_reference(BlocklistSet set,
                                        const std::vector<Token>& reference_tokens) {
    for (auto& b : set.blocklists) {
        if (b.removed_by_reference) continue;
        for (const auto& tok : reference_tokens) {
            if (b.candidates.count(tok.normalized)) {
                b.removed_by_reference = true;
                b.removing_word = tok.normalized;
                break;
            }
        }
    }
    return set;
}

/// Marks the hypothesis as a literal translation error when any of its
/// words is still blocklisted after filtering.
inline LitterVerdict check_hypothesis(const BlocklistSet& filtered,
                                      const std::vector<Token>& hypothesis_tokens) {
    LitterVerdict verdict;
    verdict.pair_id = filtered.pair_id;
    verdict.active_blocklists = filtered.active_count();
    for (const auto& tok : hypothesis_tokens) {
        for (const auto& b : filtered.blocklists) {
            if (b.removed_by_reference) continue;
            if (b.candidates.count(tok.normalized))
                verdict.triggering_words.emplace(tok.normalized, b.source_word);
        }
    }
    verdict.triggered = !verdict.triggering_words.empty();
    return verdict;
}

// ---------------------------------------------------------------------------
// corpus-level scoring

struct LitterSentence {
    std::string pair_id;
    std::string idiom_id;  // grouping idiom for macro-averaging
    bool triggered = false;
    bool unscorable = false;  // no active blocklist survived OOV + filtering
    bool multi_idiom = false;
    std::set<std::pair<std::string, std::string>> triggering_words;
    std::size_t active_blocklists = 0;
    std::vector<std::string> oov_words;
    std::size_t span_word_count = 0;  // alphabetic span words
};

struct PerIdiomRate {
    std::size_t evaluated = 0;
    std::size_t triggered = 0;

    double rate() const { return evaluated == 0 ? 0.0 : static_cast<double>(triggered) / evaluated; }
};

struct LitterResult {
    double macro = 0.0;
    double micro = 0.0;
    std::size_t evaluated_pairs = 0;
    std::size_t triggered_pairs = 0;
    std::size_t unscorable_pairs = 0;
    double oov_rate = 0.0;  // OOV span words / alphabetic span words
    std::map<std::string, PerIdiomRate> per_idiom;
    std::vector<LitterSentence> sentences;  // corpus order
};

/// Scores every annotated pair against its hypothesis. A sentence counts
/// once: it is triggered if any of its spans triggers, and is grouped under
/// the triggering span's idiom (the first span's when none trigger). The
/// corpus score macro-averages the per-idiom trigger rates; the micro rate
/// is reported alongside.
inline LitterResult litter_corpus(const std::vector<AnnotatedPair>& pairs,
                                  const std::map<std::string, std::string>& hypotheses,
                                  const BilingualLexicon& lexicon) {
    LitterResult result;
    std::size_t total_span_words = 0;
    std::size_t total_oov = 0;

    for (const auto& pair : pairs) {
        if (!pair.has_idiom()) continue;
        const auto hyp_it = hypotheses.find(pair.pair_id);
        if (hyp_it == hypotheses.end())
            throw input_error("missing hypothesis for pair " + pair.pair_id);
        const std::vector<Token> hyp_tokens = tokenize(hyp_it->second);

        LitterSentence sent;
        sent.pair_id = pair.pair_id;
        sent.idiom_id = pair.spans.front().idiom_id;
        sent.multi_idiom = [&] {
            std::set<std::string> ids;
            for (const auto& s : pair.spans) ids.insert(s.idiom_id);
            return ids.size() > 1;
        }();

        for (const auto& span : pair.spans) {
            BlocklistSet set = build_blocklists(pair, span, lexicon);
            total_span_words += set.blocklists.size() + set.oov_words.size();
            sent.span_word_count += set.blocklists.size() + set.oov_words.size();
            total_oov += set.oov_words.size();
            sent.oov_words.insert(sent.oov_words.end(), set.oov_words.begin(),
                                  set.oov_words.end());
            set = filter_by_reference(std::move(set), pair.target_tokens);
            const LitterVerdict verdict = check_hypothesis(set, hyp_tokens);
            sent.active_blocklists += verdict.active_blocklists;
            if (verdict.triggered && !sent.triggered) {
                sent.triggered = true;
                sent.idiom_id = span.idiom_id;  // group under the triggering span
            }
            sent.triggering_words.insert(verdict.triggering_words.begin(),
                                         verdict.triggering_words.end());
        }
        sent.unscorable = sent.active_blocklists == 0;

        ++result.evaluated_pairs;
        if (sent.triggered) ++result.triggered_pairs;
        if (sent.unscorable) ++result.unscorable_pairs;
        auto& per = result.per_idiom[sent.idiom_id];
        ++per.evaluated;
        if (sent.triggered) ++per.triggered;
        result.sentences.push_back(std::move(sent));
    }

    if (!result.per_idiom.empty()) {
        double sum = 0.0;
        for (const auto& [idiom, per] : result.per_idiom) sum += per.rate();
        result.macro = sum / static_cast<double>(result.per_idiom.size());
    }
    if (result.evaluated_pairs > 0)
        result.micro = static_cast<double>(result.triggered_pairs) / result.evaluated_pairs;
    if (total_span_words > 0)
        result.oov_rate = static_cast<double>(total_oov) / total_span_words;
    return result;
}

}  // namespace idiomeval
