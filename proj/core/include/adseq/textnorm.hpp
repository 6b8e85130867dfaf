// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <string_view>

namespace adseq {

/// Deduplicated, lowercased, punctuation-free, stopword-filtered tokens.
struct TokenSet {
    std::set<std::string> tokens;

    bool empty() const { return tokens.empty(); }
    size_t size() const { return tokens.size(); }
    bool operator==(const TokenSet&) const = default;
};

/// Fixed pipeline: Unicode lowercase, strip punctuation (Unicode P*
/// categories), split on Unicode whitespace, drop English stopwords,
/// deduplicate. Empty input yields an empty set.
TokenSet normalize_tokens(std::string_view text);

/// |a n b| / |a u b|. Both empty -> 1.0, exactly one empty -> 0.0.
double token_iou(const TokenSet& a, const TokenSet& b);

/// The vendored English stopword list (assets/stopwords_en.txt).
const std::set<std::string>& stopwords_en();

}  // namespace adseq
