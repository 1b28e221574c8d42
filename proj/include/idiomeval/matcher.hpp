#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "idiomeval/corpus.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/tokenize.hpp"

namespace idiomeval {

enum class CoarsePos { VERB, PART, DET, OTHER };

struct Morph {
    std::string lemma;
    CoarsePos pos = CoarsePos::OTHER;
};

/// Per-token lemma and coarse part-of-speech for one sentence, parallel to
/// its token list.
using MorphAnalysis = std::vector<Morph>;

/// Surface-to-lemma table with deterministic suffix-rule fallback. The
/// table is plain text, one "surface<TAB>lemma" entry per line.
class Lemmatizer {
  public:
    Lemmatizer() = default;

    static Lemmatizer load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw input_error("cannot open lemma lexicon: " + path);
        Lemmatizer lem;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) continue;
            lem.add(line.substr(0, tab), line.substr(tab + 1));
        }
        return lem;
    }

    void add(std::string_view surface, std::string_view lemma) {
        const std::string key = normalize(surface);
        const std::string value = normalize(lemma);
        if (key.empty() || value.empty()) return;
        table_[key] = value;
        lemma_vocab_.insert(value);
    }

    /// Lemma of a normalized word: table lookup, then -ing/-ed/-es/-s
    /// stripping with undoubling and e-restoration, else identity.
    std::string lemma(std::string_view normalized_word) const {
        const std::string w(normalized_word);
        if (const auto it = table_.find(w); it != table_.end()) return it->second;
        if (auto l = strip_suffix(w, "ing", 5)) return *l;
        if (w.size() >= 5 && w.ends_with("ied")) return w.substr(0, w.size() - 3) + "y";
        if (auto l = strip_suffix(w, "ed", 4)) return *l;
        if (w.size() >= 5 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
        if (w.size() >= 4 && w.ends_with("es")) {
            const std::string base = w.substr(0, w.size() - 2);
            if (base.ends_with("s") || base.ends_with("x") || base.ends_with("z") ||
                base.ends_with("ch") || base.ends_with("sh"))
                return base;
        }
        if (w.size() >= 3 && w.ends_with("s") && !w.ends_with("ss") && !w.ends_with("us"))
            return w.substr(0, w.size() - 1);
        return w;
    }

    bool empty() const { return table_.empty(); }

  private:
    std::optional<std::string> strip_suffix(const std::string& w, std::string_view suffix,
                                            std::size_t min_len) const {
        if (w.size() < min_len || !w.ends_with(suffix)) return std::nullopt;
        const std::string base = w.substr(0, w.size() - suffix.size());
        // "running" -> "runn": prefer a known lemma among the undoubled and
        // e-restored candidates before settling on the bare stem.
        if (lemma_vocab_.count(base)) return base;
        if (base.size() >= 3 && base[base.size() - 1] == base[base.size() - 2] &&
            lemma_vocab_.count(base.substr(0, base.size() - 1)))
            return base.substr(0, base.size() - 1);
        if (lemma_vocab_.count(base + "e")) return base + "e";
        return base;
    }

    std::map<std::string, std::string> table_;
    std::set<std::string> lemma_vocab_;
};

/// Built-in lemma entries covering frequent irregular verbs;
/// data/lemmas_en.tsv ships the same table for use through the CLI.
inline constexpr const char* kBuiltinLemmaEntries[][2] = {
    {"am", "be"},       {"are", "be"},      {"is", "be"},      {"was", "be"},
    {"were", "be"},     {"been", "be"},     {"has", "have"},   {"had", "have"},
    {"does", "do"},     {"did", "do"},      {"done", "do"},    {"goes", "go"},
    {"went", "go"},     {"gone", "go"},     {"bit", "bite"},   {"bitten", "bite"},
    {"blew", "blow"},   {"blown", "blow"},  {"broke", "break"},{"broken", "break"},
    {"brought", "bring"},{"built", "build"},{"bought", "buy"}, {"caught", "catch"},
    {"came", "come"},   {"cut", "cut"},     {"drew", "draw"},  {"drawn", "draw"},
    {"ate", "eat"},     {"eaten", "eat"},   {"fell", "fall"},  {"fallen", "fall"},
    {"felt", "feel"},   {"fought", "fight"},{"found", "find"}, {"flew", "fly"},
    {"flown", "fly"},   {"forgot", "forget"},{"gave", "give"}, {"given", "give"},
    {"got", "get"},     {"gotten", "get"},  {"grew", "grow"},  {"grown", "grow"},
    {"heard", "hear"},  {"held", "hold"},   {"hit", "hit"},    {"kept", "keep"},
    {"knew", "know"},   {"known", "know"},  {"laid", "lay"},   {"led", "lead"},
    {"left", "leave"},  {"lent", "lend"},   {"let", "let"},    {"lay", "lie"},
    {"lost", "lose"},   {"made", "make"},   {"meant", "mean"}, {"met", "meet"},
    {"paid", "pay"},    {"put", "put"},     {"ran", "run"},    {"run", "run"},
    {"said", "say"},    {"saw", "see"},     {"seen", "see"},   {"sold", "sell"},
    {"sent", "send"},   {"set", "set"},     {"shook", "shake"},{"shaken", "shake"},
    {"shot", "shoot"},  {"showed", "show"}, {"shown", "show"}, {"shut", "shut"},
    {"sang", "sing"},   {"sung", "sing"},   {"sat", "sit"},    {"slept", "sleep"},
    {"spoke", "speak"}, {"spoken", "speak"},{"spent", "spend"},{"stood", "stand"},
    {"stuck", "stick"}, {"swam", "swim"},   {"took", "take"},  {"taken", "take"},
    {"taught", "teach"},{"told", "tell"},   {"thought", "think"},{"threw", "throw"},
    {"thrown", "throw"},{"tried", "try"},   {"understood", "understand"},
    {"woke", "wake"},   {"wore", "wear"},   {"worn", "wear"},  {"won", "win"},
    {"wrote", "write"}, {"written", "write"},{"pulling", "pull"},{"pulled", "pull"},
    {"pulls", "pull"},
    };

inline const Lemmatizer& builtin_lemmatizer() {
    static const Lemmatizer lem = [] {
        Lemmatizer l;
        for (const auto& e : kBuiltinLemmaEntries) l.add(e[0], e[1]);
        return l;
    }();
    return lem;
}

/// Lemmatizes every token of a tokenized sentence. Apostrophe clitics get
/// POS PART; a tiny closed class gets DET; -ing/-ed forms are tagged VERB.
inline MorphAnalysis analyze(const std::vector<Token>& tokens, const Lemmatizer& lemmas) {
    static const std::set<std::string> kDeterminers = {"the", "a", "an", "this", "that",
                                                       "these", "those"};
    MorphAnalysis out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        Morph m;
        if (!t.normalized.empty() && t.normalized.front() == '\'') {
            m.lemma = t.normalized;
            m.pos = CoarsePos::PART;
        } else if (kDeterminers.count(t.normalized)) {
            m.lemma = t.normalized;
            m.pos = CoarsePos::DET;
        } else {
            m.lemma = lemmas.lemma(t.normalized);
            if (m.lemma != t.normalized &&
                (t.normalized.ends_with("ing") || t.normalized.ends_with("ed")))
                m.pos = CoarsePos::VERB;
        }
        out.push_back(std::move(m));
    }
    return out;
}

inline MorphAnalysis analyze(const std::vector<Token>& tokens, const std::string& lemma_path) {
    return analyze(tokens, Lemmatizer::load(lemma_path));
}

// ---------------------------------------------------------------------------
// patterns

enum class PatternKind { lemma_match, exact_match, wildcard, optional_possessive };

struct PatternElement {
    PatternKind kind = PatternKind::lemma_match;
    std::string lemma_or_surface;  // empty for wildcard / possessive

    friend bool operator==(const PatternElement&, const PatternElement&) = default;
};

struct IdiomPattern {
    std::string idiom_id;  // the canonical phrase
    std::vector<PatternElement> elements;
};

inline bool is_placeholder_word(std::string_view normalized) {
    return normalized == "someone" || normalized == "somebody" || normalized == "something" ||
           normalized == "one";
}

/// Compiles an idiom phrase into matchable elements. Ordinary words become
/// lemma matches; placeholder words (someone, someone's, ...) become a
/// wildcard plus an optional possessive particle, and the word right after
/// a placeholder is matched on its exact surface so "someone's eyes" keeps
/// the plural.
inline IdiomPattern compile_pattern(std::string_view phrase, const Lemmatizer& lemmas) {
    IdiomPattern pattern;
    pattern.idiom_id = std::string(phrase);
    const std::vector<Token> words = tokenize(phrase);

    bool after_placeholder = false;
    for (std::size_t k = 0; k < words.size(); ++k) {
        const std::string& w = words[k].normalized;
        if (w.empty()) continue;
        const bool possessive_next =
            k + 1 < words.size() &&
            (words[k + 1].normalized == "'s" || words[k + 1].normalized == "'");
        if (is_placeholder_word(w)) {
            pattern.elements.push_back({PatternKind::wildcard, ""});
            pattern.elements.push_back({PatternKind::optional_possessive, ""});
            if (possessive_next) ++k;  // fold "someone" + "'s" into the slots
            after_placeholder = true;
            continue;
        }
        if (after_placeholder) {
            pattern.elements.push_back({PatternKind::exact_match, w});
            after_placeholder = false;
            continue;
        }
        pattern.elements.push_back({PatternKind::lemma_match, lemmas.lemma(w)});
    }
    if (pattern.elements.empty()) throw input_error("empty idiom phrase");
    return pattern;
}

inline IdiomPattern compile_pattern(std::string_view phrase) {
    return compile_pattern(phrase, builtin_lemmatizer());
}

namespace detail {

inline bool is_possessive_token(const Token& t) {
    return t.normalized == "'s" || t.normalized == "'" || t.normalized == "s";
}

// Longest match of pattern elements starting at token `start`; npos if none.
// Optional possessive slots branch, so the result is a true longest match.
inline std::size_t match_from(const IdiomPattern& pattern, const MorphAnalysis& analysis,
                              const std::vector<Token>& tokens, std::size_t elem, std::size_t pos) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    if (elem == pattern.elements.size()) return pos;
    const auto& el = pattern.elements[elem];
    switch (el.kind) {
        case PatternKind::lemma_match:
            if (pos >= tokens.size() || analysis[pos].lemma != el.lemma_or_surface) return npos;
            return match_from(pattern, analysis, tokens, elem + 1, pos + 1);
        case PatternKind::exact_match:
            if (pos >= tokens.size() || tokens[pos].normalized != el.lemma_or_surface) return npos;
            return match_from(pattern, analysis, tokens, elem + 1, pos + 1);
        case PatternKind::wildcard:
            if (pos >= tokens.size() || !is_alphabetic_word(tokens[pos].surface)) return npos;
            return match_from(pattern, analysis, tokens, elem + 1, pos + 1);
        case PatternKind::optional_possessive: {
            std::size_t with = npos;
            if (pos < tokens.size() && is_possessive_token(tokens[pos]))
                with = match_from(pattern, analysis, tokens, elem + 1, pos + 1);
            const std::size_t without = match_from(pattern, analysis, tokens, elem + 1, pos);
            if (with == npos) return without;
            if (without == npos) return with;
            return std::max(with, without);
        }
    }
    return npos;
}

inline std::size_t match_at(const IdiomPattern& pattern, const MorphAnalysis& analysis,
                            const std::vector<Token>& tokens, std::size_t start) {
    return match_from(pattern, analysis, tokens, 0, start);
}

}  // namespace detail

/// All non-overlapping, leftmost-longest occurrences of one pattern.
inline std::vector<IdiomSpan> find_matches(const IdiomPattern& pattern,
                                           const MorphAnalysis& analysis,
                                           const std::vector<Token>& tokens) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<IdiomSpan> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const std::size_t end = detail::match_at(pattern, analysis, tokens, i);
        if (end == npos || end == i) {
            ++i;
            continue;
        }
        IdiomSpan s;
        s.idiom_id = pattern.idiom_id;
        s.token_start = i;
        s.token_end = end;
        s.char_start = tokens[i].char_start;
        s.char_end = tokens[end - 1].char_end;
        spans.push_back(std::move(s));
        i = end;
    }
    return spans;
}

// ---------------------------------------------------------------------------
// corpus extraction

/// Idiom list file: UTF-8, one phrase per line, "#" comment lines allowed.
inline std::vector<std::string> load_idiom_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open idiom list: " + path);
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const auto last = line.find_last_not_of(" \t");
        phrases.push_back(line.substr(begin, last - begin + 1));
    }
    return phrases;
}

struct ExtractResult {
    std::vector<AnnotatedPair> pairs;  // only pairs with at least one match
    std::vector<std::pair<std::string, std::size_t>> frequency_table;  // every idiom listed
};

/// Scans line-aligned parallel text for idiom occurrences and emits
/// annotated pairs in input order. Overlapping matches of different idioms
/// are resolved leftmost-longest, then by idiom id.
inline ExtractResult extract_corpus(const std::vector<std::string>& idiom_phrases,
                                    const std::vector<std::string>& source_lines,
                                    const std::vector<std::string>& target_lines,
                                    const Lemmatizer& lemmas = builtin_lemmatizer()) {
    if (source_lines.size() != target_lines.size()) throw input_error("parallel files differ in line count");
    std::vector<IdiomPattern> patterns;
    patterns.reserve(idiom_phrases.size());
    std::map<std::string, std::size_t> counts;
    for (const auto& phrase : idiom_phrases) {
        patterns.push_back(compile_pattern(phrase, lemmas));
        counts.emplace(phrase, 0);
    }

    ExtractResult result;
    for (std::size_t line = 0; line < source_lines.size(); ++line) {
        const std::vector<Token> tokens = tokenize(source_lines[line]);
        if (tokens.empty()) continue;
        const MorphAnalysis analysis = analyze(tokens, lemmas);

        std::vector<IdiomSpan> candidates;
        for (const auto& p : patterns) {
            auto spans = find_matches(p, analysis, tokens);
            candidates.insert(candidates.end(), spans.begin(), spans.end());
        }
        if (candidates.empty()) continue;
        std::sort(candidates.begin(), candidates.end(),
                  [](const IdiomSpan& a, const IdiomSpan& b) {
                      if (a.token_start != b.token_start) return a.token_start < b.token_start;
                      if (a.token_end != b.token_end) return a.token_end > b.token_end;
                      return a.idiom_id < b.idiom_id;
                  });
        std::vector<IdiomSpan> accepted;
        std::size_t covered_until = 0;
        for (auto& s : candidates) {
            if (s.token_start < covered_until) continue;
            covered_until = s.token_end;
            ++counts[s.idiom_id];
            accepted.push_back(std::move(s));
        }
        result.pairs.push_back(make_annotated_pair(std::to_string(line + 1), source_lines[line],
                                                   target_lines[line], std::move(accepted)));
    }

    result.frequency_table.assign(counts.begin(), counts.end());
    std::sort(result.frequency_table.begin(), result.frequency_table.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second > b.second : a.first < b.first;
              });
    return result;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace idiomeval
