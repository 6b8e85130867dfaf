// SPDX-License-Identifier: Apache-2.0

#include "adseq/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>

#include "adseq/assets.hpp"
#include "adseq/errors.hpp"

namespace adseq {

std::string to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::vlm_describe: return "vlm_describe";
        case PromptKind::vlm_single: return "vlm_single";
        case PromptKind::summarize: return "summarize";
        case PromptKind::candidates: return "candidates";
        case PromptKind::score_guideline: return "score_guideline";
        case PromptKind::score_redundancy: return "score_redundancy";
        case PromptKind::score_story: return "score_story";
        case PromptKind::score_counts: return "score_counts";
        case PromptKind::judge_storyrecall: return "judge_storyrecall";
    }
    return "unknown";
}

const std::vector<std::string>& prompt_variables(PromptKind kind) {
    static const std::map<PromptKind, std::vector<std::string>> vars = {
        {PromptKind::vlm_describe, {"char_text"}},
        {PromptKind::vlm_single, {"char_text", "num_words"}},
        {PromptKind::summarize, {"text"}},
        {PromptKind::candidates, {"text", "num_words"}},
        {PromptKind::score_guideline, {"candidate"}},
        {PromptKind::score_redundancy, {"candidate", "current_desc"}},
        {PromptKind::score_story, {"candidate", "current_desc"}},
        {PromptKind::score_counts, {"candidate"}},
        {PromptKind::judge_storyrecall, {"gt_sequence", "pred_sequence"}},
    };
    return vars.at(kind);
}

RenderedPrompt parse_prompt_container(std::string_view data) {
    constexpr std::string_view head = "<<SYSTEM>>\n";
    constexpr std::string_view sep = "\n<<USER>>\n";
    if (data.substr(0, head.size()) != head) {
        throw TemplateError("template container must start with <<SYSTEM>>");
    }
    const size_t sep_pos = data.find(sep, head.size() - 1);
    if (sep_pos == std::string_view::npos) {
        throw TemplateError("template container is missing the <<USER>> marker");
    }
    RenderedPrompt out;
    out.system = std::string(data.substr(head.size(), sep_pos - head.size()));
    out.user = std::string(data.substr(sep_pos + sep.size()));
    return out;
}

std::string format_prompt_container(const RenderedPrompt& prompt) {
    return "<<SYSTEM>>\n" + prompt.system + "\n<<USER>>\n" + prompt.user;
}

namespace {

std::string template_asset_name(PromptKind kind, const RenderOptions& options) {
    if (kind == PromptKind::score_counts && options.counts_style == CountsPromptStyle::extended) {
        return "prompts/score_counts_extended.txt";
    }
    return "prompts/" + to_string(kind) + ".txt";
}

std::string substitute(const std::string& tmpl, const std::map<std::string, std::string>& bindings,
                       std::set<std::string>& used) {
    std::string out;
    out.reserve(tmpl.size());
    size_t i = 0;
    while (i < tmpl.size()) {
        const char c = tmpl[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        const size_t close = tmpl.find('}', i);
        if (close == std::string::npos) {
            throw TemplateError("unterminated placeholder in template");
        }
        const std::string name = tmpl.substr(i + 1, close - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) {
            throw TemplateError("missing binding for template variable '" + name + "'");
        }
        used.insert(name);
        out += it->second;
        i = close + 1;
    }
    return out;
}

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

RenderedPrompt render_prompt(PromptKind kind, const std::map<std::string, std::string>& bindings,
                             const RenderOptions& options) {
    const auto& declared = prompt_variables(kind);
    for (const auto& [name, value] : bindings) {
        if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
            throw TemplateError("extra binding '" + name + "' for prompt kind " + to_string(kind));
        }
    }
    for (const auto& name : declared) {
        if (!bindings.contains(name)) {
            throw TemplateError("missing binding '" + name + "' for prompt kind " + to_string(kind));
        }
    }

    const RenderedPrompt tmpl =
        parse_prompt_container(assets::get(template_asset_name(kind, options)));
    std::set<std::string> used;
    RenderedPrompt out;
    out.system = substitute(tmpl.system, bindings, used);
    out.user = substitute(tmpl.user, bindings, used);
    return out;
}

std::string character_binding(const std::vector<std::string>& names) {
    if (names.empty()) return "";
    std::string line = "The characters that may appear in this segment are: ";
    for (size_t i = 0; i < names.size(); ++i) {
        if (i > 0) line += ", ";
        line += names[i];
    }
    line += ".";
    return line;
}

ObservationScore parse_observation_score(const std::string& text, int lo, int hi) {
    if (lo >= hi) throw std::invalid_argument("score range must satisfy lo < hi");

    static const std::regex score_re(
        R"(^\s*(?:\*\*|__)?\s*(?:final\s+)?score\s*(?:\*\*|__)?\s*[:=]\s*(?:\*\*|__)?\s*\[?\s*(-?\d+))",
        std::regex::icase);
    static const std::regex obs_re(R"(^\s*(?:\*\*|__)?\s*observations?\s*(?:\*\*|__)?\s*[:=]\s*(.*)$)",
                                   std::regex::icase);

    const std::vector<std::string> lines = split_lines(text);
    std::optional<int> score;
    int score_line = -1;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_search(lines[i], m, score_re)) {
            score = std::stoi(m[1].str());
            score_line = static_cast<int>(i);
        }
    }
    if (!score) throw ParseError("no Score line found in model output", text);
    if (*score < lo || *score > hi) {
        throw ParseError("score " + std::to_string(*score) + " outside [" + std::to_string(lo) +
                             "," + std::to_string(hi) + "]",
                         text);
    }

    ObservationScore out;
    out.score = *score;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::smatch m;
        if (std::regex_search(lines[i], m, obs_re)) {
            std::string obs = trim(m[1].str());
            // Collect continuation lines up to the score line.
            for (size_t k = i + 1; k < lines.size() && static_cast<int>(k) != score_line; ++k) {
                std::smatch m2;
                if (std::regex_search(lines[k], m2, score_re)) break;
                if (trim(lines[k]).empty()) break;
                obs += "\n" + lines[k];
            }
            out.observations = trim(obs);
            break;
        }
    }
    return out;
}

std::vector<std::string> parse_numbered_candidates(const std::string& text, int max_candidates) {
    if (max_candidates < 1) throw std::invalid_argument("max_candidates must be at least 1");

    static const std::regex item_re(R"(^\s*(\d+)[.)]\s+(.*\S)\s*$)");
    const std::vector<std::string> lines = split_lines(text);

    std::vector<std::string> items;
    int expected = 1;
    bool in_list = false;
    for (const auto& line : lines) {
        std::smatch m;
        if (std::regex_match(line, m, item_re)) {
            const int number = std::stoi(m[1].str());
            if (!in_list) {
                if (number != 1) continue;  // prose happens to start with "3." etc.
                in_list = true;
            } else if (number != expected) {
                break;  // list ended; whatever follows is trailing prose
            }
            items.push_back(trim(m[2].str()));
            ++expected;
        } else if (in_list && !trim(line).empty()) {
            break;
        }
    }

    if (items.empty()) {
        throw ParseError("no numbered candidate list found in model output", text);
    }
    if (static_cast<int>(items.size()) > max_candidates) {
        std::cerr << "warning: model produced " << items.size() << " candidates, keeping the first "
                  << max_candidates << "\n";
        items.resize(max_candidates);
    }
    return items;
}

namespace {

// "a, b - 2" -> items {a, b}; the trailing dash-count is advisory, the item
// list is authoritative.
std::vector<std::string> parse_category_items(const std::string& remainder) {
    static const std::regex tail_re(R"(^(.*?)(?:\s*-\s*\d+\s*)?$)");
    std::smatch m;
    std::string list_part = remainder;
    if (std::regex_match(remainder, m, tail_re)) list_part = m[1].str();
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(list_part);
    while (std::getline(in, item, ',')) {
        std::string cleaned = trim(item);
        if (!cleaned.empty()) items.push_back(std::move(cleaned));
    }
    return items;
}

}  // namespace

CountReport parse_count_report(const std::string& text) {
    static const std::regex cat_re(
        R"(^\s*(?:\*\*|__)?\s*(participants|actions|other\s+details)\s*(?:\*\*|__)?\s*:\s*(.*)$)",
        std::regex::icase);

    CountReport report;
    bool any = false;
    bool saw_actions = false;
    for (const auto& line : split_lines(text)) {
        std::smatch m;
        if (!std::regex_search(line, m, cat_re)) continue;
        any = true;
        std::string category = m[1].str();
        std::transform(category.begin(), category.end(), category.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        auto items = parse_category_items(m[2].str());
        if (category == "participants") {
            report.participant_items = std::move(items);
            report.participants = static_cast<int>(report.participant_items.size());
        } else if (category == "actions") {
            saw_actions = true;
            report.action_items = std::move(items);
            report.actions = static_cast<int>(report.action_items.size());
        } else {
            report.salient_items = std::move(items);
            report.salient_details = static_cast<int>(report.salient_items.size());
        }
    }
    if (!any) throw ParseError("no count category lines found in model output", text);
    if (!saw_actions) {
        std::cerr << "warning: count report has no Actions line, counting 0 actions\n";
    }
    return report;
}

}  // namespace adseq
