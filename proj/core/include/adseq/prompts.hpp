// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adseq {

enum class PromptKind {
    vlm_describe,
    vlm_single,
    summarize,
    candidates,
    score_guideline,
    score_redundancy,
    score_story,
    score_counts,
    judge_storyrecall,
};

std::string to_string(PromptKind kind);

/// Two variants of the counts prompt: `extended` adds the Actions output line
/// so all three count sub-scores are observable; `two_category` is the
/// original two-category wording.
enum class CountsPromptStyle { extended, two_category };

struct RenderedPrompt {
    std::string system;  // empty when the kind has no system prompt
    std::string user;
};

struct RenderOptions {
    CountsPromptStyle counts_style = CountsPromptStyle::extended;
};

/// Declared variable names for a kind, e.g. {"candidate","current_desc"}.
const std::vector<std::string>& prompt_variables(PromptKind kind);

/// Substitutes `{variable}` placeholders into the kind's template. Bindings
/// must cover the declared variables exactly; anything else is a
/// TemplateError naming the variable.
RenderedPrompt render_prompt(PromptKind kind, const std::map<std::string, std::string>& bindings,
                             const RenderOptions& options = {});

/// The neutral character line bound to {char_text}; empty list -> "".
std::string character_binding(const std::vector<std::string>& names);

/// A judge/scorer verdict: free-text observations plus an integer score.
struct ObservationScore {
    std::string observations;
    int score = 0;
};

/// Extracts the last `Score:` line (tolerant of case, brackets, bold markers
/// and trailing prose). Scores outside [lo, hi] are an error, never clamped.
ObservationScore parse_observation_score(const std::string& text, int lo, int hi);

/// Extracts `N. <sentence>` items, N consecutive from 1, ignoring
/// surrounding prose. Returns at most `max_candidates` items (warns when
/// truncating). Zero items is a ParseError carrying the raw text.
std::vector<std::string> parse_numbered_candidates(const std::string& text, int max_candidates);

struct CountReport {
    int participants = 0;
    int actions = 0;
    int salient_details = 0;
    std::vector<std::string> participant_items;
    std::vector<std::string> action_items;
    std::vector<std::string> salient_items;
    bool parse_failed = false;  // midpoint fallback marker
};

/// Parses `Participants:` / `Actions:` / `Other Details:` lines of the form
/// `<comma-separated list> - <count>`. Counts come from the item lists. A
/// missing Actions line yields 0 (the two-category prompt has none); no
/// category line at all is a ParseError.
CountReport parse_count_report(const std::string& text);

/// Container format shared by template assets and golden files:
/// "<<SYSTEM>>\n" + system + "\n<<USER>>\n" + user.
RenderedPrompt parse_prompt_container(std::string_view data);
std::string format_prompt_container(const RenderedPrompt& prompt);

}  // namespace adseq
