#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace convsearch {

// One retrievable text unit. id is unique within a Collection, text is
// non-empty.
struct Passage {
    std::string id;
    std::string text;
    std::optional<std::string> title;

    bool operator==(const Passage&) const = default;
};

// One question of a conversation. index is 1-based. answer may be absent
// only on the final turn of an unanswered conversation. gold_ids is the
// (possibly empty) set of relevant passages, kept sorted and deduplicated.
// rewrite is an optional gold standalone question.
struct Turn {
    int index = 0;
    std::string question;
    std::optional<std::string> answer;
    std::vector<std::string> gold_ids;
    std::optional<std::string> rewrite;

    bool operator==(const Turn&) const = default;
};

// Ordered question-answer exchange. Turn indices are exactly 1..n.
struct Conversation {
    std::string id;
    std::vector<Turn> turns;

    bool operator==(const Conversation&) const = default;
};

// Immutable passage set with total lookup by id. Safe for concurrent reads
// after construction.
class Collection {
public:
    Collection() = default;

    // Validates ids (non-empty, unique) and texts (non-empty).
    static Collection from_passages(std::vector<Passage> passages);

    const std::vector<Passage>& passages() const { return passages_; }
    std::size_t size() const { return passages_.size(); }
    bool empty() const { return passages_.empty(); }

    bool contains(std::string_view id) const;
    const Passage* find(std::string_view id) const;  // nullptr when absent
    const Passage& at(std::string_view id) const;    // throws ValidationError

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>>
        by_id_;
};

// Line-delimited JSON loaders/writers. One object per line, UTF-8.
//   passage record:      {"id", "text", "title"?}
//   conversation record: {"id", "turns": [{"turn", "question", "answer"?,
//                          "gold_ids": [...], "rewrite"?}]}
Collection load_passages(const std::string& path);
std::vector<Conversation> load_conversations(const std::string& path,
                                             const Collection* collection = nullptr);

void save_passages(const std::string& path, const Collection& collection);
void save_conversations(const std::string& path,
                        const std::vector<Conversation>& conversations);

std::string passage_to_json_line(const Passage& p);
std::string conversation_to_json_line(const Conversation& c);

// Structural checks shared by loaders and the synthesizer: turn indices
// exactly 1..n, answers absent only on final turns, gold ids resolving in
// the collection when one is given.
void validate_conversation(const Conversation& c,
                           const Collection* collection = nullptr);

}  // namespace convsearch
