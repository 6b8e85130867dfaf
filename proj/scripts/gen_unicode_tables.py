#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.inc from the Python unicodedata module.

The tables cover exactly what the text normalizer needs: codepoint ranges for
the Unicode punctuation categories (P*), the White_Space set, and the simple
(single-codepoint) lowercase mapping.
"""

import sys
import unicodedata

MAX_CP = 0x110000


def punct_ranges():
    ranges = []
    start = None
    for cp in range(MAX_CP):
        is_p = unicodedata.category(chr(cp)).startswith("P")
        if is_p and start is None:
            start = cp
        elif not is_p and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def whitespace_codepoints():
    # White_Space property: Zs/Zl/Zp plus the control whitespace characters.
    extra = {0x09, 0x0A, 0x0B, 0x0C, 0x0D, 0x85}
    cps = set(extra)
    for cp in range(MAX_CP):
        if unicodedata.category(chr(cp)) in ("Zs", "Zl", "Zp"):
            cps.add(cp)
    return sorted(cps)


def lower_pairs():
    pairs = []
    for cp in range(MAX_CP):
        lowered = chr(cp).lower()
        if len(lowered) == 1 and lowered != chr(cp):
            pairs.append((cp, ord(lowered)))
    return pairs


def main(out_path):
    pr = punct_ranges()
    ws = whitespace_codepoints()
    lp = lower_pairs()
    with open(out_path, "w", encoding="utf-8") as f:
        f.write("// Generated by scripts/gen_unicode_tables.py (Python %s, unicodedata %s).\n"
                % (sys.version.split()[0], unicodedata.unidata_version))
        f.write("// Do not edit by hand.\n\n")
        f.write("struct CodepointRange { char32_t lo; char32_t hi; };\n")
        f.write("struct LowerPair { char32_t from; char32_t to; };\n\n")

        f.write("inline constexpr CodepointRange kPunctRanges[] = {\n")
        for lo, hi in pr:
            f.write("    {0x%X, 0x%X},\n" % (lo, hi))
        f.write("};\n\n")

        f.write("inline constexpr char32_t kWhitespace[] = {\n")
        for i in range(0, len(ws), 8):
            f.write("    " + ", ".join("0x%X" % c for c in ws[i:i + 8]) + ",\n")
        f.write("};\n\n")

        f.write("inline constexpr LowerPair kLowerPairs[] = {\n")
        for frm, to in lp:
            f.write("    {0x%X, 0x%X},\n" % (frm, to))
        f.write("};\n")
    print("punct ranges: %d, whitespace: %d, lower pairs: %d" % (len(pr), len(ws), len(lp)))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "core/src/unicode_tables.inc")
