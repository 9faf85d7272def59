#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "convsearch/corpus.hpp"
#include "convsearch/error.hpp"
#include "convsearch/io.hpp"

using namespace convsearch;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("convsearch_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }

    static inline int counter = 0;
};

}  // namespace

TEST_CASE("load_passages reads well-formed records") {
    TempDir dir;
    const std::string path = dir.file("p.jsonl");
    write_text_file(path,
                    "{\"id\":\"p1\",\"text\":\"a view to a kill\"}\n"
                    "{\"id\":\"p2\",\"text\":\"james bond\",\"title\":\"Bond\"}\n");
    const Collection c = load_passages(path);
    REQUIRE(c.size() == 2);
    CHECK(c.at("p1").text == "a view to a kill");
    CHECK(c.at("p2").title == "Bond");
    CHECK(c.find("p3") == nullptr);
}

TEST_CASE("load_passages of an empty file gives an empty collection") {
    TempDir dir;
    const std::string path = dir.file("empty.jsonl");
    write_text_file(path, "");
    CHECK(load_passages(path).size() == 0);
}

TEST_CASE("duplicate passage ids are rejected by name") {
    TempDir dir;
    const std::string path = dir.file("dup.jsonl");
    write_text_file(path,
                    "{\"id\":\"p1\",\"text\":\"one\"}\n"
                    "{\"id\":\"p1\",\"text\":\"two\"}\n");
    CHECK_THROWS_WITH_AS(load_passages(path), doctest::Contains("p1"),
                         ValidationError);
}

TEST_CASE("malformed passage line reports its line number") {
    TempDir dir;
    const std::string path = dir.file("bad.jsonl");
    write_text_file(path, "{\"id\":\"p1\",\"text\":\"ok\"}\nnot json\n");
    CHECK_THROWS_WITH_AS(load_passages(path), doctest::Contains(":2"), ParseError);
}

TEST_CASE("load_conversations keeps turn order and validates golds") {
    TempDir dir;
    const std::string ppath = dir.file("p.jsonl");
    write_text_file(ppath, "{\"id\":\"p1\",\"text\":\"x\"}\n");
    const Collection col = load_passages(ppath);

    const std::string cpath = dir.file("c.jsonl");
    write_text_file(
        cpath,
        "{\"id\":\"c1\",\"turns\":["
        "{\"turn\":1,\"question\":\"q1\",\"answer\":\"a1\",\"gold_ids\":[\"p1\"]},"
        "{\"turn\":2,\"question\":\"q2\",\"answer\":\"a2\",\"gold_ids\":[],\"rewrite\":\"r2\"},"
        "{\"turn\":3,\"question\":\"q3\",\"gold_ids\":[\"p1\"]}]}\n");
    const auto convs = load_conversations(cpath, &col);
    REQUIRE(convs.size() == 1);
    REQUIRE(convs[0].turns.size() == 3);
    CHECK(convs[0].turns[0].question == "q1");
    CHECK(convs[0].turns[1].rewrite == "r2");
    CHECK(!convs[0].turns[2].answer.has_value());  // final turn may be unanswered

    SUBCASE("gap in turn indices") {
        const std::string gpath = dir.file("gap.jsonl");
        write_text_file(gpath,
                        "{\"id\":\"c1\",\"turns\":["
                        "{\"turn\":1,\"question\":\"q\",\"answer\":\"a\"},"
                        "{\"turn\":3,\"question\":\"q\"}]}\n");
        CHECK_THROWS_AS(load_conversations(gpath), ValidationError);
    }
    SUBCASE("unknown gold id is named") {
        const std::string upath = dir.file("unk.jsonl");
        write_text_file(upath,
                        "{\"id\":\"c1\",\"turns\":[{\"turn\":1,\"question\":\"q\","
                        "\"gold_ids\":[\"p9\"]}]}\n");
        CHECK_THROWS_WITH_AS(load_conversations(upath, &col),
                             doctest::Contains("p9"), ValidationError);
        CHECK_NOTHROW(load_conversations(upath));  // no collection, no check
    }
    SUBCASE("missing answer before the final turn") {
        const std::string mpath = dir.file("mid.jsonl");
        write_text_file(mpath,
                        "{\"id\":\"c1\",\"turns\":["
                        "{\"turn\":1,\"question\":\"q\"},"
                        "{\"turn\":2,\"question\":\"q\",\"answer\":\"a\"}]}\n");
        CHECK_THROWS_AS(load_conversations(mpath), ValidationError);
    }
}

TEST_CASE("save/load round-trips record for record") {
    TempDir dir;
    std::vector<Passage> ps;
    ps.push_back({"p1", "first text", std::nullopt});
    ps.push_back({"p2", "second text", "A Title"});
    const Collection col = Collection::from_passages(ps);

    Conversation conv;
    conv.id = "c1";
    conv.turns.push_back({1, "who?", "them", {"p1", "p2"}, "who exactly?"});
    conv.turns.push_back({2, "why?", std::nullopt, {}, std::nullopt});

    const std::string ppath = dir.file("p.jsonl");
    const std::string cpath = dir.file("c.jsonl");
    save_passages(ppath, col);
    save_conversations(cpath, {conv});

    const Collection col2 = load_passages(ppath);
    REQUIRE(col2.size() == col.size());
    CHECK(col2.passages() == col.passages());

    const auto convs2 = load_conversations(cpath, &col2);
    REQUIRE(convs2.size() == 1);
    CHECK(convs2[0] == conv);

    // and the serialized bytes are canonical
    save_passages(dir.file("p2.jsonl"), col2);
    CHECK(read_text_file(dir.file("p2.jsonl")) == read_text_file(ppath));
}
