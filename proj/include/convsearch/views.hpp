#pragma once

#include <string>
#include <string_view>

#include "convsearch/corpus.hpp"

namespace convsearch {

// Deterministic renderings of a conversation prefix into a single query
// string. Utterances are joined with the literal separator " [SEP] ".
enum class QueryView {
    full,              // q_1, a_1, ..., a_{t-1}, q_t
    history_only,      // q_1, a_1, ..., a_{t-1}
    current_only,      // q_t
    last_answer_only,  // a_{t-1}, requires t >= 2
    first_only,        // q_1
    rewrite,           // the turn's standalone rewrite, must be present
};

// Stable CLI/config identifiers: full, history_only, current_only,
// last_answer_only, first_only, rewrite.
std::string_view view_name(QueryView v);
QueryView parse_view(std::string_view name);  // throws ConfigError

struct RenderLimits {
    int max_query_tokens = 128;
    int max_passage_tokens = 384;
};

// Renders turn t of the conversation under the given view.
//
// Truncation: token counts use tokenize() over utterance text; the " [SEP] "
// separators do not count against the budget. When the total exceeds
// max_query_tokens, tokens are dropped from the left of the history, except
// that the first question q_1 is always retained in full and the current
// question q_t (in views that include it) is never truncated. A partially
// truncated utterance is re-emitted as its surviving tokens joined by
// single spaces; untouched utterances keep their original text.
std::string render_query(const Conversation& conversation, int t, QueryView view,
                         const RenderLimits& limits);

}  // namespace convsearch
