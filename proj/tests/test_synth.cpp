#include <doctest.h>

#include <set>
#include <sstream>

#include "convsearch/bm25.hpp"
#include "convsearch/error.hpp"
#include "convsearch/eval.hpp"
#include "convsearch/synth.hpp"
#include "convsearch/text.hpp"

using namespace convsearch;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.topics = 4;
    cfg.terms_per_topic = 20;
    cfg.passages_per_topic = 8;
    cfg.passage_tokens = 12;
    cfg.conversations = 6;
    cfg.turns_per_conversation = 5;
    return cfg;
}

std::string serialize(const Collection& col, const std::vector<Conversation>& convs) {
    std::ostringstream out;
    for (const Passage& p : col.passages()) out << passage_to_json_line(p) << '\n';
    for (const Conversation& c : convs) out << conversation_to_json_line(c) << '\n';
    return out.str();
}

std::set<std::string> token_set(const std::string& text) {
    const TokenSequence toks = tokenize(text);
    return {toks.begin(), toks.end()};
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (b.count(x)) return true;
    return false;
}

}  // namespace

TEST_CASE("generate_synthetic validates its config") {
    SynthConfig cfg = small_config();
    cfg.topics = 1;
    CHECK_THROWS_AS(generate_synthetic(cfg, 1), ConfigError);
    cfg = small_config();
    cfg.p_switch = 1.5;
    CHECK_THROWS_AS(generate_synthetic(cfg, 1), ConfigError);
    cfg = small_config();
    cfg.p_switch = -0.1;
    CHECK_THROWS_AS(generate_synthetic(cfg, 1), ConfigError);
}

TEST_CASE("generate_synthetic is a pure function of (config, seed)") {
    const SynthConfig cfg = small_config();
    const auto [col_a, convs_a] = generate_synthetic(cfg, 42);
    const auto [col_b, convs_b] = generate_synthetic(cfg, 42);
    CHECK(serialize(col_a, convs_a) == serialize(col_b, convs_b));

    const auto [col_c, convs_c] = generate_synthetic(cfg, 43);
    CHECK(serialize(col_a, convs_a) != serialize(col_c, convs_c));
}

TEST_CASE("synthetic shapes: passage count, turns, golds resolve") {
    const SynthConfig cfg = small_config();
    const auto [col, convs] = generate_synthetic(cfg, 7);
    CHECK(col.size() ==
          static_cast<std::size_t>(cfg.topics * cfg.passages_per_topic));
    REQUIRE(convs.size() == static_cast<std::size_t>(cfg.conversations));
    for (const Conversation& c : convs) {
        REQUIRE(c.turns.size() == static_cast<std::size_t>(cfg.turns_per_conversation));
        for (const Turn& t : c.turns) {
            REQUIRE(t.gold_ids.size() == 1);
            CHECK(col.contains(t.gold_ids[0]));
            CHECK(t.rewrite.has_value());
        }
    }
}

TEST_CASE("p_switch extremes map to classifier labels") {
    SynthConfig cfg = small_config();
    const double tau = 0.0;

    SUBCASE("p_switch = 0: every non-first turn is no-switch") {
        cfg.p_switch = 0.0;
        const auto [col, convs] = generate_synthetic(cfg, 11);
        const BM25Index index = BM25Index::build(col, {});
        const TurnTypeLabels labels = classify_turn_types(convs, index, tau);
        for (const Conversation& c : convs) {
            for (const Turn& t : c.turns) {
                const TurnType want = t.index == 1 ? TurnType::First : TurnType::NoSwitch;
                CHECK(labels.at({c.id, t.index}) == want);
            }
        }
    }
    SUBCASE("p_switch = 1: every non-first turn switches") {
        cfg.p_switch = 1.0;
        const auto [col, convs] = generate_synthetic(cfg, 11);
        const BM25Index index = BM25Index::build(col, {});
        const TurnTypeLabels labels = classify_turn_types(convs, index, tau);
        for (const Conversation& c : convs) {
            for (const Turn& t : c.turns) {
                const TurnType want = t.index == 1 ? TurnType::First : TurnType::Switch;
                CHECK(labels.at({c.id, t.index}) == want);
            }
        }
    }
}

TEST_CASE("full anaphora with no switches plants the shortcut by construction") {
    SynthConfig cfg = small_config();
    cfg.p_switch = 0.0;
    cfg.anaphora_rate = 1.0;
    const auto [col, convs] = generate_synthetic(cfg, 5);

    for (const Conversation& c : convs) {
        for (std::size_t i = 1; i < c.turns.size(); ++i) {
            const Turn& turn = c.turns[i];
            const auto question = token_set(turn.question);
            const auto gold = token_set(col.at(turn.gold_ids[0]).text);
            CHECK(!intersects(question, gold));

            const Turn& prev = c.turns[i - 1];
            REQUIRE(prev.answer.has_value());
            CHECK(intersects(token_set(*prev.answer), gold));
        }
    }
}

TEST_CASE("unanswered conversations drop the final answer and gold") {
    SynthConfig cfg = small_config();
    cfg.unanswered_rate = 1.0;
    const auto [col, convs] = generate_synthetic(cfg, 3);
    for (const Conversation& c : convs) {
        const Turn& last = c.turns.back();
        CHECK(!last.answer.has_value());
        CHECK(last.gold_ids.empty());
        for (std::size_t i = 0; i + 1 < c.turns.size(); ++i)
            CHECK(c.turns[i].answer.has_value());
    }
}
