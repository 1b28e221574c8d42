#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace idiomeval {

namespace detail {

struct CharRange {
    char32_t lo;
    char32_t hi;
};

#include "idiomeval/detail/unicode_tables.inc"

template <std::size_t N>
inline bool in_ranges(const CharRange (&ranges)[N], char32_t cp) {
    auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                               [](char32_t c, const CharRange& r) { return c < r.lo; });
    return it != std::begin(ranges) && cp <= std::prev(it)->hi;
}

inline const FoldEntry* find_fold(char32_t cp) {
    auto it = std::lower_bound(std::begin(kFoldTable), std::end(kFoldTable), cp,
                               [](const FoldEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kFoldTable) && it->cp == cp) return it;
    return nullptr;
}

}  // namespace detail

inline bool is_letter(char32_t cp) { return detail::in_ranges(detail::kLetterRanges, cp); }
inline bool is_mark(char32_t cp) { return detail::in_ranges(detail::kMarkRanges, cp); }
inline bool is_digit(char32_t cp) { return detail::in_ranges(detail::kDigitRanges, cp); }
inline bool is_space(char32_t cp) { return detail::in_ranges(detail::kSpaceRanges, cp); }

/// Decodes UTF-8 permissively; ill-formed byte sequences become U+FFFD.
inline std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        char32_t cp = 0xFFFD;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        // reject overlong encodings
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

/// Folds text for comparison: lowercase, compatibility-decomposed with
/// nonspacing marks removed, recomposed. Pure and idempotent; the heavy
/// lifting is a precomputed per-code-point table.
inline std::string normalize(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (char32_t cp : decode_utf8(word)) {
        if (const auto* e = detail::find_fold(cp)) {
            for (std::uint8_t k = 0; k < e->len; ++k) append_utf8(out, e->out[k]);
        } else {
            append_utf8(out, cp);
        }
    }
    return out;
}

}  // namespace idiomeval
