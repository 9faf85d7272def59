#include "convsearch/views.hpp"

#include <algorithm>

#include "convsearch/error.hpp"
#include "convsearch/text.hpp"

namespace convsearch {
namespace {

constexpr std::string_view kSep = " [SEP] ";

struct Utterance {
    std::string_view text;
    bool protected_from_truncation;
};

std::string join_tokens(const TokenSequence& tokens, std::size_t first) {
    std::string out;
    for (std::size_t i = first; i < tokens.size(); ++i) {
        if (!out.empty()) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

// Drops tokens from the left of the unprotected utterances until the total
// content-token count fits the budget, then joins with " [SEP] ".
std::string assemble(const std::vector<Utterance>& parts, int max_tokens) {
    std::vector<TokenSequence> tokens(parts.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        tokens[i] = tokenize(parts[i].text);
        total += tokens[i].size();
    }

    const auto budget = static_cast<std::size_t>(max_tokens);
    std::vector<std::size_t> drop(parts.size(), 0);
    for (std::size_t i = 0; i < parts.size() && total > budget; ++i) {
        if (parts[i].protected_from_truncation) continue;
        const std::size_t take = std::min(tokens[i].size(), total - budget);
        drop[i] = take;
        total -= take;
    }

    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::string piece;
        if (drop[i] == 0) {
            piece = std::string(parts[i].text);
        } else if (drop[i] < tokens[i].size()) {
            piece = join_tokens(tokens[i], drop[i]);
        } else {
            continue;  // fully truncated away
        }
        if (piece.empty()) continue;
        if (!out.empty()) out += kSep;
        out += piece;
    }
    return out;
}

const std::string& answer_at(const Conversation& c, int turn_index) {
    const Turn& turn = c.turns[static_cast<std::size_t>(turn_index - 1)];
    if (!turn.answer) {
        throw ValidationError("conversation \"" + c.id + "\" turn " +
                              std::to_string(turn_index) + " has no answer");
    }
    return *turn.answer;
}

}  // namespace

std::string_view view_name(QueryView v) {
    switch (v) {
        case QueryView::full: return "full";
        case QueryView::history_only: return "history_only";
        case QueryView::current_only: return "current_only";
        case QueryView::last_answer_only: return "last_answer_only";
        case QueryView::first_only: return "first_only";
        case QueryView::rewrite: return "rewrite";
    }
    return "unknown";
}

QueryView parse_view(std::string_view name) {
    for (QueryView v : {QueryView::full, QueryView::history_only,
                        QueryView::current_only, QueryView::last_answer_only,
                        QueryView::first_only, QueryView::rewrite}) {
        if (view_name(v) == name) return v;
    }
    throw ConfigError("unknown query view \"" + std::string(name) + "\"");
}

std::string render_query(const Conversation& conversation, int t, QueryView view,
                         const RenderLimits& limits) {
    const int n = static_cast<int>(conversation.turns.size());
    if (t < 1 || t > n) {
        throw ConfigError("turn index " + std::to_string(t) +
                          " out of range 1.." + std::to_string(n) +
                          " for conversation \"" + conversation.id + "\"");
    }
    const Turn& turn = conversation.turns[static_cast<std::size_t>(t - 1)];

    std::vector<Utterance> parts;
    switch (view) {
        case QueryView::full:
        case QueryView::history_only: {
            const bool include_current = view == QueryView::full;
            for (int i = 1; i < t; ++i) {
                const Turn& prev = conversation.turns[static_cast<std::size_t>(i - 1)];
                parts.push_back({prev.question, i == 1});
                if (prev.answer) parts.push_back({*prev.answer, false});
            }
            if (include_current) parts.push_back({turn.question, true});
            break;
        }
        case QueryView::current_only:
            parts.push_back({turn.question, true});
            break;
        case QueryView::last_answer_only:
            if (t < 2) {
                throw ConfigError("last_answer_only view is undefined at turn 1");
            }
            parts.push_back({answer_at(conversation, t - 1), false});
            break;
        case QueryView::first_only:
            parts.push_back({conversation.turns.front().question, true});
            break;
        case QueryView::rewrite:
            if (!turn.rewrite) {
                throw ValidationError("conversation \"" + conversation.id +
                                      "\" turn " + std::to_string(t) +
                                      " carries no rewrite");
            }
            parts.push_back({*turn.rewrite, true});
            break;
    }
    return assemble(parts, limits.max_query_tokens);
}

}  // namespace convsearch
