#!/usr/bin/env python3
"""Regenerates include/idiomeval/detail/unicode_tables.inc.

The fold table maps a code point to its folded form: lowercase, NFKD
decomposition, nonspacing marks removed, NFC recomposition, iterated to a
fixed point. Only code points whose folded form differs from the identity
are emitted. Folds that expand beyond MAX_FOLD code points are dropped
(treated as identity); these are exotic ligature-phrases only.

Also emits merged code point ranges for the letter (L*), mark (M*),
decimal digit (Nd) and whitespace classes used by the tokenizer.
"""

import sys
import unicodedata

MAX_FOLD = 3
MAX_CP = 0x10FFFF


def fold(cp: int) -> str:
    s = chr(cp)
    for _ in range(8):
        prev = s
        s = s.lower()
        s = unicodedata.normalize("NFKD", s)
        s = "".join(c for c in s if unicodedata.category(c) != "Mn")
        s = unicodedata.normalize("NFC", s)
        if s == prev:
            return s
    raise RuntimeError(f"fold of U+{cp:04X} did not converge")


def collect_folds():
    entries = []
    for cp in range(MAX_CP + 1):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        out = fold(cp)
        if out == chr(cp):
            continue
        cps = [ord(c) for c in out]
        if len(cps) > MAX_FOLD:
            continue
        # The table is applied once per input code point, so every output
        # code point must itself be a fixed point.
        for c in cps:
            if fold(c) != chr(c):
                raise RuntimeError(f"fold of U+{cp:04X} is not idempotent")
        entries.append((cp, cps))
    return entries


def collect_ranges(pred):
    ranges = []
    start = None
    for cp in range(MAX_CP + 1):
        if 0xD800 <= cp <= 0xDFFF:
            ok = False
        else:
            ok = pred(chr(cp))
        if ok and start is None:
            start = cp
        elif not ok and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP))
    return ranges


WHITESPACE = set("\t\n\x0b\x0c\r\x1c\x1d\x1e\x1f \x85")


def main():
    folds = collect_folds()
    letters = collect_ranges(lambda c: unicodedata.category(c)[0] == "L")
    marks = collect_ranges(lambda c: unicodedata.category(c)[0] == "M")
    digits = collect_ranges(lambda c: unicodedata.category(c) == "Nd")
    spaces = collect_ranges(
        lambda c: c in WHITESPACE or unicodedata.category(c)[0] == "Z"
    )

    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py "
              f"(Unicode {unicodedata.unidata_version}). Do not edit.\n\n")

    out.write(f"inline constexpr std::size_t kFoldMax = {MAX_FOLD};\n\n")
    out.write("struct FoldEntry {\n")
    out.write("  char32_t cp;\n")
    out.write(f"  char32_t out[{MAX_FOLD}];\n")
    out.write("  std::uint8_t len;\n")
    out.write("};\n\n")

    out.write(f"inline constexpr FoldEntry kFoldTable[{len(folds)}] = {{\n")
    for cp, cps in folds:
        padded = cps + [0] * (MAX_FOLD - len(cps))
        body = ", ".join(f"0x{c:04X}" for c in padded)
        out.write(f"    {{0x{cp:04X}, {{{body}}}, {len(cps)}}},\n")
    out.write("};\n\n")

    for name, ranges in (("Letter", letters), ("Mark", marks),
                         ("Digit", digits), ("Space", spaces)):
        out.write(f"inline constexpr CharRange k{name}Ranges"
                  f"[{len(ranges)}] = {{\n")
        for lo, hi in ranges:
            out.write(f"    {{0x{lo:04X}, 0x{hi:04X}}},\n")
        out.write("};\n\n")


if __name__ == "__main__":
    main()
