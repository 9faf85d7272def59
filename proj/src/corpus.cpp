#include "convsearch/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "convsearch/error.hpp"

namespace convsearch {
namespace {

using nlohmann::json;

std::vector<std::string> canonical_gold_ids(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

json parse_line(const std::string& path, std::size_t line_no,
                const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": malformed record");
    }
    return j;
}

std::string require_string(const json& j, const char* key,
                           const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ParseError(where + ": missing or non-string field \"" + key +
                         "\"");
    }
    return j.at(key).get<std::string>();
}

}  // namespace

Collection Collection::from_passages(std::vector<Passage> passages) {
    Collection c;
    c.passages_ = std::move(passages);
    c.by_id_.reserve(c.passages_.size());
    for (std::size_t i = 0; i < c.passages_.size(); ++i) {
        const Passage& p = c.passages_[i];
        if (p.id.empty()) throw ValidationError("passage with empty id");
        if (p.text.empty())
            throw ValidationError("passage \"" + p.id + "\" has empty text");
        if (!c.by_id_.emplace(p.id, i).second)
            throw ValidationError("duplicate passage id \"" + p.id + "\"");
    }
    return c;
}

bool Collection::contains(std::string_view id) const {
    return by_id_.find(id) != by_id_.end();
}

const Passage* Collection::find(std::string_view id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &passages_[it->second];
}

const Passage& Collection::at(std::string_view id) const {
    const Passage* p = find(id);
    if (!p) throw ValidationError("unknown passage id \"" + std::string(id) + "\"");
    return *p;
}

Collection load_passages(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::vector<Passage> passages;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(path, line_no, line);
        const std::string where = path + ":" + std::to_string(line_no);
        Passage p;
        p.id = require_string(j, "id", where);
        p.text = require_string(j, "text", where);
        if (j.contains("title")) {
            if (!j.at("title").is_string())
                throw ParseError(where + ": non-string \"title\"");
            p.title = j.at("title").get<std::string>();
        }
        passages.push_back(std::move(p));
    }
    return Collection::from_passages(std::move(passages));
}

void validate_conversation(const Conversation& c, const Collection* collection) {
    if (c.id.empty()) throw ValidationError("conversation with empty id");
    for (std::size_t i = 0; i < c.turns.size(); ++i) {
        const Turn& t = c.turns[i];
        const int expected = static_cast<int>(i) + 1;
        if (t.index != expected) {
            throw ValidationError("conversation \"" + c.id +
                                  "\": turn indices must be exactly 1..n, got " +
                                  std::to_string(t.index) + " at position " +
                                  std::to_string(expected));
        }
        if (!t.answer.has_value() && i + 1 != c.turns.size()) {
            throw ValidationError("conversation \"" + c.id + "\": turn " +
                                  std::to_string(t.index) +
                                  " lacks an answer but is not the final turn");
        }
        if (collection) {
            for (const auto& gid : t.gold_ids) {
                if (!collection->contains(gid)) {
                    throw ValidationError("conversation \"" + c.id + "\" turn " +
                                          std::to_string(t.index) +
                                          ": unknown gold id \"" + gid + "\"");
                }
            }
        }
    }
}

std::vector<Conversation> load_conversations(const std::string& path,
                                             const Collection* collection) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    std::vector<Conversation> out;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(path, line_no, line);
        const std::string where = path + ":" + std::to_string(line_no);

        Conversation c;
        c.id = require_string(j, "id", where);
        if (!seen_ids.insert(c.id).second)
            throw ValidationError(where + ": duplicate conversation id \"" +
                                  c.id + "\"");
        if (!j.contains("turns") || !j.at("turns").is_array())
            throw ParseError(where + ": missing \"turns\" array");

        for (const auto& tj : j.at("turns")) {
            if (!tj.is_object()) throw ParseError(where + ": malformed turn");
            Turn t;
            if (!tj.contains("turn") || !tj.at("turn").is_number_integer())
                throw ParseError(where + ": turn without integer \"turn\" index");
            t.index = tj.at("turn").get<int>();
            if (t.index < 1)
                throw ValidationError(where + ": turn index must be >= 1");
            t.question = require_string(tj, "question", where);
            if (tj.contains("answer")) {
                if (!tj.at("answer").is_string())
                    throw ParseError(where + ": non-string \"answer\"");
                t.answer = tj.at("answer").get<std::string>();
            }
            if (tj.contains("gold_ids")) {
                if (!tj.at("gold_ids").is_array())
                    throw ParseError(where + ": \"gold_ids\" must be an array");
                for (const auto& g : tj.at("gold_ids")) {
                    if (!g.is_string())
                        throw ParseError(where + ": non-string gold id");
                    t.gold_ids.push_back(g.get<std::string>());
                }
                t.gold_ids = canonical_gold_ids(std::move(t.gold_ids));
            }
            if (tj.contains("rewrite")) {
                if (!tj.at("rewrite").is_string())
                    throw ParseError(where + ": non-string \"rewrite\"");
                t.rewrite = tj.at("rewrite").get<std::string>();
            }
            c.turns.push_back(std::move(t));
        }
        validate_conversation(c, collection);
        out.push_back(std::move(c));
    }
    return out;
}

std::string passage_to_json_line(const Passage& p) {
    json j;
    j["id"] = p.id;
    j["text"] = p.text;
    if (p.title) j["title"] = *p.title;
    return j.dump();
}

std::string conversation_to_json_line(const Conversation& c) {
    json j;
    j["id"] = c.id;
    json turns = json::array();
    for (const Turn& t : c.turns) {
        json tj;
        tj["turn"] = t.index;
        tj["question"] = t.question;
        if (t.answer) tj["answer"] = *t.answer;
        tj["gold_ids"] = t.gold_ids;
        if (t.rewrite) tj["rewrite"] = *t.rewrite;
        turns.push_back(std::move(tj));
    }
    j["turns"] = std::move(turns);
    return j.dump();
}

void save_passages(const std::string& path, const Collection& collection) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const Passage& p : collection.passages())
        out << passage_to_json_line(p) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

void save_conversations(const std::string& path,
                        const std::vector<Conversation>& conversations) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const Conversation& c : conversations)
        out << conversation_to_json_line(c) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace convsearch
