#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "skillmap/corpus.hpp"
#include "skillmap/errors.hpp"

namespace fs = std::filesystem;
using namespace skillmap;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& contents) {
        path = fs::temp_directory_path() /
               ("skillmap_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::ofstream(path) << contents;
    }
    ~TempFile() { fs::remove(path); }
};

}  // namespace

TEST_CASE("tokenize lowercases, splits and keeps math symbols") {
    std::set<std::string> stops(default_stop_words().begin(), default_stop_words().end());
    auto t = tokenize("The Sum of 2+3 = 5!", stops);
    CHECK(t == std::vector<std::string>{"sum", "2", "+", "3", "=", "5"});
    CHECK(tokenize("x < y^2", stops) == std::vector<std::string>{"x", "<", "y", "^", "2"});
    CHECK(tokenize("", stops).empty());
}

TEST_CASE("timestamps parse in both modes") {
    CHECK(parse_timestamp("1600000000", true) == 1600000000);
    // 1970-01-02 00:00:00 UTC
    CHECK(parse_timestamp("1970-01-02 00:00:00", false) == 86400);
    CHECK(parse_timestamp("1970-01-01T01:00:00", false) == 3600);
    CHECK_THROWS_AS(parse_timestamp("not a time", false), DataError);
    CHECK_THROWS_AS(parse_timestamp("abc", true), DataError);
}

TEST_CASE("response log loading") {
    LogSchema schema;
    schema.epoch_time = true;

    SUBCASE("happy path with multi-skill rows") {
        TempFile f(
            "student_id,problem_id,skill_ids,start_time\n"
            "s1,p1,addition,100\n"
            "s1,p2,addition|carrying,200\n"
            "s2,p1,,300\n");
        LoadStats stats;
        auto rows = load_response_logs(f.path.string(), schema, &stats);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].skill_ids == std::vector<std::string>{"addition", "carrying"});
        CHECK(stats.rows_read == 3);
        CHECK(stats.rows_without_skill == 1);
    }
    SUBCASE("missing column names the column") {
        TempFile f("student_id,problem_id,start_time\ns1,p1,100\n");
        CHECK_THROWS_WITH_AS(load_response_logs(f.path.string(), schema),
                             doctest::Contains("skill_ids"), ConfigError);
    }
    SUBCASE("bad row carries its line number") {
        TempFile f("student_id,problem_id,skill_ids,start_time\ns1,p1,a,100\ns1,p2,b,junk\n");
        CHECK_THROWS_WITH_AS(load_response_logs(f.path.string(), schema),
                             doctest::Contains("line 3"), DataError);
    }
    SUBCASE("quoted fields may contain the delimiter") {
        TempFile f(
            "student_id,problem_id,skill_ids,start_time\n"
            "s1,p1,\"add, then carry\",100\n");
        auto rows = load_response_logs(f.path.string(), schema);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].skill_ids == std::vector<std::string>{"add, then carry"});
    }
}

TEST_CASE("problem texts keep the last duplicate") {
    TempFile f(
        "{\"problem_id\": \"p1\", \"text\": \"first\"}\n"
        "{\"problem_id\": \"p1\", \"text\": \"second\"}\n");
    std::size_t dups = 0;
    auto texts = load_problem_texts(f.path.string(), &dups);
    CHECK(texts.at("p1") == "second");
    CHECK(dups == 1);
}

TEST_CASE("equivalence pairs with NONE markers round-trip") {
    TempFile f(
        "src_skill,dst_skill\n"
        "a1,b1\n"
        "a1,b2\n"
        "a2,NONE\n"
        "NONE,b3\n");
    EquivalenceSet eq = load_equivalence_pairs(f.path.string());
    CHECK(eq.pairs.size() == 2);
    CHECK(eq.none_skills_src == std::set<std::string>{"a2"});
    CHECK(eq.none_skills_dst == std::set<std::string>{"b3"});
    CHECK(eq.destinations_of("a1") == std::set<std::string>{"b1", "b2"});
    CHECK(eq.source_skills() == std::set<std::string>{"a1"});

    const fs::path out = fs::temp_directory_path() / "skillmap_pairs_rt.csv";
    write_equivalence_pairs(eq, out.string());
    EquivalenceSet back = load_equivalence_pairs(out.string());
    CHECK(back.pairs == eq.pairs);
    CHECK(back.none_skills_src == eq.none_skills_src);
    CHECK(back.none_skills_dst == eq.none_skills_dst);
    fs::remove(out);

    EquivalenceSet bad = eq;
    bad.none_skills_src.insert("a1");
    CHECK_THROWS_AS(bad.validate(), DataError);

    EquivalenceSet rev = eq.reversed();
    CHECK(rev.pairs.count({"b1", "a1"}) == 1);
    CHECK(rev.none_skills_src == std::set<std::string>{"b3"});
}

namespace {

PlatformCorpus sample_corpus() {
    std::vector<Interaction> rows;
    auto add = [&](const std::string& student, const std::string& problem,
                   std::vector<std::string> skills, std::int64_t t) {
        Interaction it;
        it.student_id = student;
        it.problem_id = problem;
        it.skill_ids = std::move(skills);
        it.start_time = t;
        it.row_index = rows.size();
        rows.push_back(it);
    };
    add("s2", "p1", {"add"}, 30);
    add("s1", "p1", {"add"}, 10);
    add("s1", "p2", {"add", "carry"}, 20);
    add("s1", "p3", {"mul"}, 15);
    add("s2", "p3", {"mul"}, 5);
    return make_corpus("plat", std::move(rows),
                       {{"p1", "The sum of two"}, {"p2", "carry the one"}, {"p3", "times table"}});
}

}  // namespace

TEST_CASE("make_corpus registers skills and links problems") {
    PlatformCorpus c = sample_corpus();
    CHECK(c.skills == std::set<std::string>{"add", "carry", "mul"});
    CHECK(c.skill_to_problems.at("add") == std::set<std::string>{"p1", "p2"});
    CHECK(c.problems.at("p1").raw_text == "The sum of two");
}

TEST_CASE("preprocess filters and is idempotent") {
    PlatformCorpus c = sample_corpus();
    PreprocessOptions opts;
    opts.min_responses_per_skill = 2;

    SUBCASE("response threshold drops rare skills") {
        PlatformCorpus p = preprocess(c, opts);
        // add: 3 responses, mul: 2, carry: 1
        CHECK(p.skills == std::set<std::string>{"add", "mul"});
        for (const auto& it : p.interactions) {
            for (const auto& s : it.skill_ids) CHECK(s != "carry");
        }
    }
    SUBCASE("single-skill filter runs before counting") {
        opts.single_skill_only = true;
        PlatformCorpus p = preprocess(c, opts);
        // the multi-skill p2 row is dropped, leaving add with 2 responses
        CHECK(p.skills == std::set<std::string>{"add", "mul"});
        CHECK(p.interactions.size() == 4);
    }
    SUBCASE("idempotence") {
        PlatformCorpus once = preprocess(c, opts);
        PlatformCorpus twice = preprocess(once, opts);
        CHECK(once.skills == twice.skills);
        CHECK(once.interactions.size() == twice.interactions.size());
        CHECK(once.problems.size() == twice.problems.size());
    }
    SUBCASE("empty result is an error") {
        opts.min_responses_per_skill = 100;
        CHECK_THROWS_AS(preprocess(c, opts), DataError);
    }
    SUBCASE("tokens are cleaned") {
        opts.min_responses_per_skill = 1;
        PlatformCorpus p = preprocess(c, opts);
        CHECK(p.problems.at("p1").tokens == std::vector<std::string>{"sum", "two"});
    }
}

TEST_CASE("skill sequences order by time then row, students ascending") {
    PlatformCorpus c = sample_corpus();
    auto seqs = build_skill_sequences(c, 42);
    REQUIRE(seqs.size() == 2);
    // s1: t=10 add, t=15 mul, t=20 {add,carry}
    REQUIRE(seqs[0].size() == 4);
    CHECK(seqs[0][0] == "add");
    CHECK(seqs[0][1] == "mul");
    CHECK(std::set<std::string>(seqs[0].begin() + 2, seqs[0].end()) ==
          std::set<std::string>{"add", "carry"});
    // s2: t=5 mul, t=30 add
    CHECK(seqs[1] == std::vector<std::string>{"mul", "add"});
    CHECK(build_skill_sequences(c, 42) == seqs);  // deterministic
}
