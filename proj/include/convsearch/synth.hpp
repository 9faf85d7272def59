#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "convsearch/corpus.hpp"

namespace convsearch {

// Desk-scale synthetic conversational-search data. Topics carry disjoint
// term vocabularies; passages contain only their own topic's terms, so
// cross-topic lexical overlap is exactly zero. Questions and answers mix in
// a shared generic vocabulary that never appears in passages.
//
// The construction plants the retrieval shortcut: every answer quotes its
// turn's gold passage, and when the next turn stays on topic the answer
// also leaks a few terms of the NEXT turn's gold passage (the way a real
// answer names the entity the follow-up asks about). An anaphoric follow-up
// question then contains generic terms only, so the history alone - not the
// question - identifies the gold passage. At a topic switch the question
// itself introduces the new gold passage's terms and the history carries
// nothing useful.
struct SynthConfig {
    int topics = 20;
    int terms_per_topic = 60;
    int passages_per_topic = 100;
    int passage_tokens = 30;          // including the always-present topic anchor term
    int conversations = 300;
    int turns_per_conversation = 6;
    double p_switch = 0.2;            // probability a non-first turn changes topic
    double anaphora_rate = 0.8;       // fraction of non-switch questions with no topic terms
    double unanswered_rate = 0.0;     // conversations whose final turn has no answer/gold
    bool emit_rewrites = true;        // standalone rewrites for every answered turn
};

// Pure function of (config, seed): same inputs give byte-identical
// serialized output. Throws ConfigError on out-of-range fields
// (topics < 2, probabilities outside [0, 1], non-positive counts).
std::pair<Collection, std::vector<Conversation>> generate_synthetic(
    const SynthConfig& config, std::uint64_t seed);

}  // namespace convsearch
