#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "idiomeval/detail/rng.hpp"
#include "idiomeval/error.hpp"
#include "idiomeval/tokenize.hpp"

namespace idiomeval {

/// Half-open token range of one idiom occurrence in the source sentence.
/// The character range is the hull of the covered tokens.
struct IdiomSpan {
    std::string idiom_id;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const IdiomSpan&, const IdiomSpan&) = default;
};

struct AnnotatedPair {
    std::string pair_id;
    std::string source_raw;
    std::string target_raw;
    std::vector<Token> source_tokens;
    std::vector<Token> target_tokens;
    std::vector<IdiomSpan> spans;  // empty for regular data

    bool has_idiom() const { return !spans.empty(); }
};

/// Builds a pair from raw text, tokenizing both sides. Span char ranges are
/// derived from the covered tokens; token ranges are validated.
inline AnnotatedPair make_annotated_pair(std::string pair_id, std::string source, std::string target,
                               std::vector<IdiomSpan> spans = {}) {
    AnnotatedPair p;
    p.pair_id = std::move(pair_id);
    p.source_tokens = tokenize(source);
    p.target_tokens = tokenize(target);
    p.source_raw = std::move(source);
    p.target_raw = std::move(target);
    std::sort(spans.begin(), spans.end(),
              [](const IdiomSpan& a, const IdiomSpan& b) { return a.token_start < b.token_start; });
    std::size_t prev_end = 0;
    for (auto& s : spans) {
        if (s.token_start >= s.token_end || s.token_end > p.source_tokens.size())
            throw input_error("pair " + p.pair_id + ": span out of token range");
        if (s.token_start < prev_end)
            throw input_error("pair " + p.pair_id + ": overlapping spans");
        prev_end = s.token_end;
        s.char_start = p.source_tokens[s.token_start].char_start;
        s.char_end = p.source_tokens[s.token_end - 1].char_end;
        p.spans.push_back(std::move(s));
    }
    return p;
}

// ---------------------------------------------------------------------------
// line-delimited corpus format:
//   {"pair_id": "...", "source": "...", "target": "...",
//    "spans": [{"idiom_id": "...", "token_start": i, "token_end": j,
//               "char_start": a, "char_end": b}]}

inline nlohmann::ordered_json pair_to_json(const AnnotatedPair& p) {
    nlohmann::ordered_json rec;
    rec["pair_id"] = p.pair_id;
    rec["source"] = p.source_raw;
    rec["target"] = p.target_raw;
    auto spans = nlohmann::ordered_json::array();
    for (const auto& s : p.spans) {
        nlohmann::ordered_json j;
        j["idiom_id"] = s.idiom_id;
        j["token_start"] = s.token_start;
        j["token_end"] = s.token_end;
        j["char_start"] = s.char_start;
        j["char_end"] = s.char_end;
        spans.push_back(std::move(j));
    }
    rec["spans"] = std::move(spans);
    return rec;
}

inline void write_corpus(const std::vector<AnnotatedPair>& pairs, std::ostream& out) {
    for (const auto& p : pairs) out << pair_to_json(p).dump() << '\n';
}

inline void write_corpus(const std::vector<AnnotatedPair>& pairs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    write_corpus(pairs, out);
}

/// Parses and validates a line-delimited corpus. Every span is re-checked
/// against the recomputed tokenization; `schema_check` additionally verifies
/// stored character offsets and collects all offending lines instead of
/// stopping at the first.
inline std::vector<AnnotatedPair> load_corpus(std::istream& in, bool schema_check = true) {
    std::vector<AnnotatedPair> pairs;
    std::set<std::string> seen_ids;
    std::vector<std::string> problems;
    auto fail = [&](std::size_t line_no, const std::string& msg) {
        std::ostringstream os;
        os << "line " << line_no << ": " << msg;
        if (!schema_check) throw input_error("corpus error: " + os.str());
        problems.push_back(os.str());
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("pair_id") ||
            !rec.contains("source") || !rec.contains("target") || !rec["pair_id"].is_string() ||
            !rec["source"].is_string() || !rec["target"].is_string()) {
            fail(line_no, "malformed record");
            continue;
        }
        std::vector<IdiomSpan> spans;
        bool spans_ok = true;
        std::vector<std::optional<std::pair<std::size_t, std::size_t>>> stored_chars;
        if (rec.contains("spans")) {
            if (!rec["spans"].is_array()) {
                fail(line_no, "malformed record");
                continue;
            }
            for (const auto& j : rec["spans"]) {
                if (!j.is_object() || !j.contains("idiom_id") || !j.contains("token_start") ||
                    !j.contains("token_end") || !j["idiom_id"].is_string() ||
                    !j["token_start"].is_number_unsigned() || !j["token_end"].is_number_unsigned()) {
                    fail(line_no, "malformed span record");
                    spans_ok = false;
                    break;
                }
                IdiomSpan s;
                s.idiom_id = j["idiom_id"].get<std::string>();
                s.token_start = j["token_start"].get<std::size_t>();
                s.token_end = j["token_end"].get<std::size_t>();
                if (j.contains("char_start") && j.contains("char_end"))
                    stored_chars.emplace_back(std::in_place, j["char_start"].get<std::size_t>(),
                                              j["char_end"].get<std::size_t>());
                else
                    stored_chars.emplace_back(std::nullopt);
                spans.push_back(std::move(s));
            }
        }
        if (!spans_ok) continue;

        AnnotatedPair p;
        try {
            p = make_annotated_pair(rec["pair_id"].get<std::string>(), rec["source"].get<std::string>(),
                          rec["target"].get<std::string>(), std::move(spans));
        } catch (const input_error& e) {
            fail(line_no, e.what());
            continue;
        }
        if (schema_check) {
            bool chars_ok = true;
            for (std::size_t k = 0; k < p.spans.size(); ++k) {
                if (stored_chars[k] &&
                    (stored_chars[k]->first != p.spans[k].char_start ||
                     stored_chars[k]->second != p.spans[k].char_end)) {
                    fail(line_no, "pair " + p.pair_id + ": span char range is not the token hull");
                    chars_ok = false;
                    break;
                }
            }
            if (!chars_ok) continue;
        }
        if (!seen_ids.insert(p.pair_id).second) {
            fail(line_no, "duplicate pair_id " + p.pair_id);
            continue;
        }
        pairs.push_back(std::move(p));
    }
    if (!problems.empty()) {
        std::ostringstream os;
        os << "corpus has " << problems.size() << " invalid record(s):";
        for (const auto& m : problems) os << "\n  " << m;
        throw input_error(os.str());
    }
    return pairs;
}

inline std::vector<AnnotatedPair> load_corpus(const std::string& path, bool schema_check = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open corpus file: " + path);
    return load_corpus(in, schema_check);
}

// ---------------------------------------------------------------------------
// preprocessing filters

enum class DropReason { length, ratio };

struct FilterResult {
    std::vector<AnnotatedPair> kept;
    std::vector<std::pair<AnnotatedPair, DropReason>> dropped;
};

inline std::size_t word_count(std::string_view raw) {
    std::size_t count = 0;
    bool in_word = false;
    for (char32_t cp : decode_utf8(raw)) {
        if (is_space(cp)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

/// Drops pairs where either side has more than `max_len` words or the
/// word-count ratio is strictly over `max_ratio`. Words are whitespace
/// delimited chunks of the raw text.
inline FilterResult preprocess_filter(std::vector<AnnotatedPair> pairs, std::size_t max_len = 80,
                                      double max_ratio = 1.5) {
    FilterResult result;
    for (auto& p : pairs) {
        const std::size_t ls = word_count(p.source_raw);
        const std::size_t lt = word_count(p.target_raw);
        if (ls > max_len || lt > max_len) {
            result.dropped.emplace_back(std::move(p), DropReason::length);
            continue;
        }
        const std::size_t lo = std::min(ls, lt);
        const std::size_t hi = std::max(ls, lt);
        if (lo != hi) {
            if (lo == 0 || static_cast<double>(hi) / static_cast<double>(lo) > max_ratio) {
                result.dropped.emplace_back(std::move(p), DropReason::ratio);
                continue;
            }
        }
        result.kept.push_back(std::move(p));
    }
    return result;
}

// ---------------------------------------------------------------------------
// train/test split construction

enum class SplitKind { zero, joint, upsample };

inline std::string to_string(SplitKind k) {
    switch (k) {
        case SplitKind::zero: return "zero";
        case SplitKind::joint: return "joint";
        case SplitKind::upsample: return "upsample";
    }
    return "?";
}

inline SplitKind split_kind_from_string(std::string_view s) {
    if (s == "zero") return SplitKind::zero;
    if (s == "joint") return SplitKind::joint;
    if (s == "upsample") return SplitKind::upsample;
    throw input_error("unknown split kind: " + std::string(s));
}

struct ManifestEntry {
    std::string pair_id;
    std::string role;  // regular | idiom-train | idiom-test
    int repeat = 1;    // occurrences in the emitted training listing
};

struct SplitManifest {
    SplitKind split_kind = SplitKind::joint;
    int upsample_factor = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> regular_ids;
    std::vector<std::string> idiom_train_ids;
    std::vector<std::string> idiom_test_ids;
    std::vector<std::string> discarded_singleton_ids;
    std::vector<std::string> multi_idiom_ids;  // diagnostics only

    int train_repeat() const {
        switch (split_kind) {
            case SplitKind::zero: return 0;
            case SplitKind::joint: return 1;
            case SplitKind::upsample: return upsample_factor;
        }
        return 1;
    }

    std::vector<ManifestEntry> entries() const {
        std::vector<ManifestEntry> out;
        out.reserve(regular_ids.size() + idiom_train_ids.size() + idiom_test_ids.size());
        for (const auto& id : regular_ids) out.push_back({id, "regular", 1});
        for (const auto& id : idiom_train_ids) out.push_back({id, "idiom-train", train_repeat()});
        for (const auto& id : idiom_test_ids) out.push_back({id, "idiom-test", 1});
        return out;
    }

    /// The expanded training listing: regular pairs once, idiom-train pairs
    /// `repeat` times (none for the zero split).
    std::vector<std::string> training_listing() const {
        std::vector<std::string> out(regular_ids.begin(), regular_ids.end());
        const int r = train_repeat();
        for (int k = 0; k < r; ++k)
            out.insert(out.end(), idiom_train_ids.begin(), idiom_train_ids.end());
        return out;
    }
};

/// Splits annotated pairs into regular / idiom-train / idiom-test sets.
/// Pairs are grouped by the idiom of their first span; each group is
/// shuffled with a seed-derived stream, the first floor(n/2) go to train and
/// the rest to test. Idioms occurring exactly once are discarded entirely.
inline SplitManifest build_split(const std::vector<AnnotatedPair>& pairs, SplitKind kind,
                                 int upsample_factor, std::uint64_t seed) {
    if (upsample_factor < 1) throw input_error("upsample factor must be >= 1");
    SplitManifest manifest;
    manifest.split_kind = kind;
    manifest.upsample_factor = kind == SplitKind::upsample ? upsample_factor : 1;
    manifest.seed = seed;

    std::map<std::string, std::vector<std::string>> by_idiom;
    for (const auto& p : pairs) {
        if (!p.has_idiom()) {
            manifest.regular_ids.push_back(p.pair_id);
            continue;
        }
        by_idiom[p.spans.front().idiom_id].push_back(p.pair_id);
        std::set<std::string> distinct;
        for (const auto& s : p.spans) distinct.insert(s.idiom_id);
        if (distinct.size() > 1) manifest.multi_idiom_ids.push_back(p.pair_id);
    }

    for (auto& [idiom, ids] : by_idiom) {
        if (ids.size() < 2) {
            manifest.discarded_singleton_ids.insert(manifest.discarded_singleton_ids.end(),
                                                    ids.begin(), ids.end());
            continue;
        }
        detail::SplitMix64 rng(seed ^ detail::fnv1a64(idiom));
        detail::fisher_yates(ids, rng);
        const std::size_t train_n = ids.size() / 2;
        manifest.idiom_train_ids.insert(manifest.idiom_train_ids.end(), ids.begin(),
                                        ids.begin() + static_cast<std::ptrdiff_t>(train_n));
        manifest.idiom_test_ids.insert(manifest.idiom_test_ids.end(),
                                       ids.begin() + static_cast<std::ptrdiff_t>(train_n),
                                       ids.end());
    }
    return manifest;
}

inline void write_manifest(const SplitManifest& m, std::ostream& out) {
    nlohmann::ordered_json head;
    head["split_kind"] = to_string(m.split_kind);
    head["upsample_factor"] = m.upsample_factor;
    head["seed"] = m.seed;
    out << head.dump() << '\n';
    for (const auto& e : m.entries()) {
        nlohmann::ordered_json rec;
        rec["pair_id"] = e.pair_id;
        rec["role"] = e.role;
        rec["repeat"] = e.repeat;
        out << rec.dump() << '\n';
    }
}

inline void write_manifest(const SplitManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    write_manifest(m, out);
}

// ---------------------------------------------------------------------------

/// Occurrence counts per idiom (one count per annotated span), sorted by
/// descending count, ties broken lexicographically by idiom id.
inline std::vector<std::pair<std::string, std::size_t>> idiom_frequency_table(
    const std::vector<AnnotatedPair>& pairs) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : pairs)
        for (const auto& s : p.spans) ++counts[s.idiom_id];
    std::vector<std::pair<std::string, std::size_t>> table(counts.begin(), counts.end());
    std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    return table;
}

}  // namespace idiomeval
