// SPDX-License-Identifier: Apache-2.0

#include "adseq/textnorm.hpp"

#include <algorithm>
#include <iterator>

#include "adseq/assets.hpp"

namespace adseq {

#include "unicode_tables.inc"

namespace {

bool is_punct(char32_t cp) {
    auto it = std::upper_bound(std::begin(kPunctRanges), std::end(kPunctRanges), cp,
                               [](char32_t v, const CodepointRange& r) { return v < r.lo; });
    if (it == std::begin(kPunctRanges)) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

bool is_space(char32_t cp) {
    return std::binary_search(std::begin(kWhitespace), std::end(kWhitespace), cp);
}

char32_t to_lower(char32_t cp) {
    auto it = std::lower_bound(std::begin(kLowerPairs), std::end(kLowerPairs), cp,
                               [](const LowerPair& p, char32_t v) { return p.from < v; });
    if (it != std::end(kLowerPairs) && it->from == cp) return it->to;
    return cp;
}

// Decodes the next UTF-8 codepoint; malformed bytes decode as U+FFFD and
// advance by one so normalization never fails on arbitrary input.
char32_t next_codepoint(std::string_view s, size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
        cp = b0;
    } else if ((b0 >> 5) == 0x6) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (size_t k = 1; k < len; ++k) {
        unsigned char b = static_cast<unsigned char>(s[i + k]);
        if ((b >> 6) != 0x2) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
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

}  // namespace

const std::set<std::string>& stopwords_en() {
    static const std::set<std::string> words = [] {
        std::set<std::string> out;
        std::string_view data = assets::get("stopwords_en.txt");
        size_t pos = 0;
        while (pos < data.size()) {
            size_t nl = data.find('\n', pos);
            if (nl == std::string_view::npos) nl = data.size();
            if (nl > pos) out.emplace(data.substr(pos, nl - pos));
            pos = nl + 1;
        }
        return out;
    }();
    return words;
}

TokenSet normalize_tokens(std::string_view text) {
    TokenSet out;
    const auto& stop = stopwords_en();
    std::string token;
    auto flush = [&] {
        if (!token.empty() && !stop.contains(token)) out.tokens.insert(token);
        token.clear();
    };
    size_t i = 0;
    while (i < text.size()) {
        char32_t cp = to_lower(next_codepoint(text, i));
        if (is_space(cp)) {
            flush();
        } else if (!is_punct(cp)) {
            append_utf8(token, cp);
        }
    }
    flush();
    return out;
}

double token_iou(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& t : a.tokens) {
        if (b.tokens.contains(t)) ++inter;
    }
    size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace adseq
