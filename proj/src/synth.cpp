#include "convsearch/synth.hpp"

#include <array>
#include <string>

#include "convsearch/error.hpp"
#include "convsearch/rng.hpp"

namespace convsearch {
namespace {

constexpr std::array<std::string_view, 16> kGenericWords = {
    "what", "who",  "when",  "where", "why",  "how",  "did",   "does",
    "tell", "more", "about", "that",  "one",  "them", "again", "please",
};

std::string topic_term(int topic, int term) {
    return "t" + std::to_string(topic) + "w" + std::to_string(term);
}

std::string zero_pad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

struct Sentence {
    std::vector<std::string> words;

    void add(std::string w) { words.push_back(std::move(w)); }

    std::string join() const {
        std::string out;
        for (const auto& w : words) {
            if (!out.empty()) out.push_back(' ');
            out += w;
        }
        return out;
    }
};

// k tokens drawn uniformly (with replacement) from a passage's token list.
void quote_from(Sentence& s, const std::vector<std::string>& passage_tokens,
                int k, Rng& rng) {
    for (int i = 0; i < k; ++i) {
        s.add(passage_tokens[static_cast<std::size_t>(rng.below(passage_tokens.size()))]);
    }
}

void generic_words(Sentence& s, int k, Rng& rng) {
    for (int i = 0; i < k; ++i) {
        s.add(std::string(kGenericWords[static_cast<std::size_t>(
            rng.below(kGenericWords.size()))]));
    }
}

}  // namespace

std::pair<Collection, std::vector<Conversation>> generate_synthetic(
    const SynthConfig& config, std::uint64_t seed) {
    if (config.topics < 2) throw ConfigError("synth: topics must be >= 2");
    if (config.p_switch < 0.0 || config.p_switch > 1.0)
        throw ConfigError("synth: p_switch must lie in [0, 1]");
    if (config.anaphora_rate < 0.0 || config.anaphora_rate > 1.0)
        throw ConfigError("synth: anaphora_rate must lie in [0, 1]");
    if (config.unanswered_rate < 0.0 || config.unanswered_rate > 1.0)
        throw ConfigError("synth: unanswered_rate must lie in [0, 1]");
    if (config.terms_per_topic < 1 || config.passages_per_topic < 1 ||
        config.passage_tokens < 1 || config.conversations < 1 ||
        config.turns_per_conversation < 1)
        throw ConfigError("synth: counts must be >= 1");

    Rng rng(seed);

    // Passages. Every passage of topic i opens with the topic anchor term
    // t<i>w0, guaranteeing same-topic passages always overlap lexically.
    const int total_passages = config.topics * config.passages_per_topic;
    const int id_width = static_cast<int>(std::to_string(total_passages).size());
    std::vector<std::vector<std::vector<std::string>>> passage_tokens(
        static_cast<std::size_t>(config.topics));
    std::vector<Passage> passages;
    passages.reserve(static_cast<std::size_t>(total_passages));
    int next_id = 0;
    for (int topic = 0; topic < config.topics; ++topic) {
        auto& topic_passages = passage_tokens[static_cast<std::size_t>(topic)];
        topic_passages.reserve(static_cast<std::size_t>(config.passages_per_topic));
        for (int p = 0; p < config.passages_per_topic; ++p) {
            std::vector<std::string> tokens;
            tokens.reserve(static_cast<std::size_t>(config.passage_tokens));
            tokens.push_back(topic_term(topic, 0));
            for (int w = 1; w < config.passage_tokens; ++w) {
                tokens.push_back(topic_term(
                    topic, static_cast<int>(rng.below(
                               static_cast<std::uint64_t>(config.terms_per_topic)))));
            }
            Sentence text;
            for (const auto& tok : tokens) text.add(tok);
            Passage passage;
            passage.id = "p" + zero_pad(next_id++, id_width);
            passage.text = text.join();
            passage.title = "topic " + std::to_string(topic);
            passages.push_back(std::move(passage));
            topic_passages.push_back(std::move(tokens));
        }
    }

    // Conversations: pick the topic/gold trajectory first, then write the
    // texts (answers need to know the next turn's gold to leak it).
    std::vector<Conversation> conversations;
    conversations.reserve(static_cast<std::size_t>(config.conversations));
    const int conv_width = static_cast<int>(std::to_string(config.conversations).size());
    for (int c = 0; c < config.conversations; ++c) {
        const int n_turns = config.turns_per_conversation;
        const bool unanswered = rng.bernoulli(config.unanswered_rate);

        std::vector<int> topic_of(static_cast<std::size_t>(n_turns));
        std::vector<int> gold_of(static_cast<std::size_t>(n_turns), -1);
        std::vector<bool> is_switch(static_cast<std::size_t>(n_turns), false);
        std::vector<bool> anaphoric(static_cast<std::size_t>(n_turns), false);

        auto pick_gold = [&](int avoid) {
            if (config.passages_per_topic == 1) return 0;
            int g = avoid;
            while (g == avoid) {
                g = static_cast<int>(
                    rng.below(static_cast<std::uint64_t>(config.passages_per_topic)));
            }
            return g;
        };

        topic_of[0] = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.topics)));
        gold_of[0] = pick_gold(-1);
        for (int t = 1; t < n_turns; ++t) {
            is_switch[t] = rng.bernoulli(config.p_switch);
            if (is_switch[t]) {
                // uniform over the other topics
                int shift = 1 + static_cast<int>(rng.below(
                                    static_cast<std::uint64_t>(config.topics - 1)));
                topic_of[t] = (topic_of[t - 1] + shift) % config.topics;
                gold_of[t] = pick_gold(-1);
            } else {
                topic_of[t] = topic_of[t - 1];
                gold_of[t] = pick_gold(gold_of[t - 1]);
                anaphoric[t] = rng.bernoulli(config.anaphora_rate);
            }
        }
        const int last = n_turns - 1;
        const bool last_has_gold = !unanswered;

        Conversation conv;
        conv.id = "c" + zero_pad(c, conv_width);
        conv.turns.reserve(static_cast<std::size_t>(n_turns));
        for (int t = 0; t < n_turns; ++t) {
            const auto& gold_toks =
                passage_tokens[static_cast<std::size_t>(topic_of[t])]
                              [static_cast<std::size_t>(gold_of[t])];
            const bool has_gold = t != last || last_has_gold;

            Turn turn;
            turn.index = t + 1;

            Sentence question;
            if (t == 0 || is_switch[t]) {
                generic_words(question, 2, rng);
                quote_from(question, gold_toks, 4, rng);
            } else if (anaphoric[t]) {
                generic_words(question, 5, rng);
            } else {
                generic_words(question, 2, rng);
                quote_from(question, gold_toks, 3, rng);
            }
            turn.question = question.join();

            if (t != last || !unanswered) {
                Sentence answer;
                answer.add(topic_term(topic_of[t], 0));
                quote_from(answer, gold_toks, 5, rng);
                if (t + 1 < n_turns && !is_switch[t + 1]) {
                    const auto& next_gold_toks =
                        passage_tokens[static_cast<std::size_t>(topic_of[t + 1])]
                                      [static_cast<std::size_t>(gold_of[t + 1])];
                    quote_from(answer, next_gold_toks, 4, rng);
                }
                generic_words(answer, 1, rng);
                turn.answer = answer.join();
            }

            if (has_gold) {
                const int global_gold =
                    topic_of[t] * config.passages_per_topic + gold_of[t];
                turn.gold_ids.push_back("p" + zero_pad(global_gold, id_width));
            }

            if (config.emit_rewrites) {
                Sentence rewrite;
                generic_words(rewrite, 2, rng);
                if (has_gold) quote_from(rewrite, gold_toks, 4, rng);
                turn.rewrite = rewrite.join();
            }
            conv.turns.push_back(std::move(turn));
        }
        conversations.push_back(std::move(conv));
    }

    Collection collection = Collection::from_passages(std::move(passages));
    for (const Conversation& conv : conversations)
        validate_conversation(conv, &collection);
    return {std::move(collection), std::move(conversations)};
}

}  // namespace convsearch
