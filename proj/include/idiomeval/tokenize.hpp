#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idiomeval/normalize.hpp"

namespace idiomeval {

/// One word, clitic or punctuation unit of a sentence. Offsets are counted
/// in code points into the original sentence, so they are byte-width
/// independent.
struct Token {
    std::string surface;
    std::string normalized;
    std::size_t char_start = 0;
    std::size_t char_end = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

inline bool is_apostrophe(char32_t cp) {
    return cp == U'\'' || cp == U'’' || cp == U'ʼ';
}

inline std::string fold_apostrophes(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : decode_utf8(s)) append_utf8(out, is_apostrophe(cp) ? U'\'' : cp);
    return out;
}

/// True when every code point is a letter or combining mark and at least one
/// is a letter. Clitics ("'s"), numbers and punctuation are not alphabetic.
inline bool is_alphabetic_word(std::string_view surface) {
    bool has_letter = false;
    for (char32_t cp : decode_utf8(surface)) {
        if (is_letter(cp))
            has_letter = true;
        else if (!is_mark(cp))
            return false;
    }
    return has_letter;
}

namespace detail {

inline bool is_word_char(char32_t cp) { return is_letter(cp) || is_digit(cp) || is_mark(cp); }

// English clitic suffixes that attach to the apostrophe ("John" + "'s"),
// lowercase ASCII. Anything else is treated as an elision prefix
// ("l'" + "exemple").
inline bool is_clitic_suffix(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    if (n == 0 || n > 2) return false;
    auto low = [&](std::size_t k) {
        char32_t c = cps[begin + k];
        return (c >= U'A' && c <= U'Z') ? c + 32 : c;
    };
    if (n == 1) {
        const char32_t c = low(0);
        return c == U's' || c == U't' || c == U'd' || c == U'm';
    }
    const char32_t a = low(0), b = low(1);
    return (a == U'l' && b == U'l') || (a == U'v' && b == U'e') || (a == U'r' && b == U'e');
}

}  // namespace detail

/// Splits a sentence into tokens: maximal letter/digit runs are words,
/// punctuation comes out as single-character tokens, and apostrophe clitics
/// are split off ("John's" -> "John" "'s", "l'exemple" -> "l'" "exemple").
inline std::vector<Token> tokenize(std::string_view sentence) {
    const std::vector<char32_t> cps = decode_utf8(sentence);
    const std::size_t n = cps.size();

    std::vector<Token> tokens;
    auto emit = [&](std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        std::string surface;
        for (std::size_t k = begin; k < end; ++k) append_utf8(surface, cps[k]);
        Token tok;
        tok.normalized = normalize(fold_apostrophes(surface));
        tok.surface = std::move(surface);
        tok.char_start = begin;
        tok.char_end = end;
        tokens.push_back(std::move(tok));
    };

    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t i = 0;
    while (i < n) {
        if (is_space(cps[i])) {
            ++i;
            continue;
        }
        if (!detail::is_word_char(cps[i])) {
            emit(i, i + 1);
            ++i;
            continue;
        }
        std::size_t word_start = i;
        while (i < n) {
            if (detail::is_word_char(cps[i])) {
                ++i;
                continue;
            }
            if (is_apostrophe(cps[i]) && word_start != npos && i > word_start &&
                is_letter(cps[i - 1]) && i + 1 < n && is_letter(cps[i + 1])) {
                std::size_t j = i + 1;
                while (j < n && detail::is_word_char(cps[j])) ++j;
                if (detail::is_clitic_suffix(cps, i + 1, j)) {
                    emit(word_start, i);  // "John" | "'s"
                    emit(i, j);
                    word_start = npos;
                    i = j;
                    break;
                }
                emit(word_start, i + 1);  // "l'" | "exemple"
                word_start = ++i;
                continue;
            }
            break;
        }
        if (word_start != npos) emit(word_start, i);
    }
    return tokens;
}

}  // namespace idiomeval
