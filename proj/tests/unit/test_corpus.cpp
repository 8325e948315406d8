#include <doctest.h>

#include <string>

#include "misinfo/corpus.hpp"
#include "misinfo/error.hpp"
#include "misinfo/verdict_map.hpp"
#include "test_util.hpp"

using namespace misinfo;

TEST_CASE("load_tweets applies the language filter and counts drops") {
    test::TempDir dir("corpus");
    test::write(dir / "t.jsonl", test::tweet_line("a", "hello there") + test::tweet_line("b", "hola", "es") +
                                     test::tweet_line("c", "more words"));
    FilterSpec f;
    f.languages = {"en"};
    const auto c = load_tweets(dir / "t.jsonl", f);
    CHECK(c.tweets.size() == 2);
    CHECK(c.manifest.input_count == 3);
    CHECK(c.manifest.dropped.at("lang") == 1);
    CHECK(c.tweets[0].tweet_id == "a");
    CHECK(c.tweets[1].tweet_id == "c");
}

TEST_CASE("empty filter spec keeps every well-formed record") {
    test::TempDir dir("corpus");
    test::write(dir / "t.jsonl", test::tweet_line("a", "x y") + test::tweet_line("b", "z w", "fr"));
    CHECK(load_tweets(dir / "t.jsonl").tweets.size() == 2);
}

TEST_CASE("duplicate tweet ids are rejected by name") {
    test::TempDir dir("corpus");
    std::string lines;
    for (int i = 0; i < 8; ++i) lines += test::tweet_line("id" + std::to_string(i), "text");
    lines += test::tweet_line("id3", "again") + test::tweet_line("id5", "again");
    test::write(dir / "t.jsonl", lines);
    try {
        load_tweets(dir / "t.jsonl");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("id3") != std::string::npos);
    }
}

TEST_CASE("malformed line is reported with its line number") {
    test::TempDir dir("corpus");
    test::write(dir / "t.jsonl", test::tweet_line("a", "ok") + "{not json\n");
    try {
        load_tweets(dir / "t.jsonl");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

namespace {

std::string long_body(int words) {
    std::string s;
    for (int i = 0; i < words; ++i) s += (i ? " w" : "w") + std::to_string(i);
    return s;
}

}  // namespace

TEST_CASE("statement bodies are truncated to 350 words with body, dropped without") {
    test::TempDir dir("stmts");
    nlohmann::json rec{{"id", "s1"}, {"source", "politifact"}, {"title", "T"}, {"claim", "C"},
                       {"body", long_body(400)}, {"verdict_raw", "False"}};
    test::write(dir / "s.jsonl", rec.dump() + "\n");
    const auto with = load_statements(dir / "s.jsonl", BodyMode::WithBody);
    REQUIRE(with.size() == 1);
    CHECK(word_count(with[0].body) == 350);
    CHECK(with[0].claim == "C");
    const auto without = load_statements(dir / "s.jsonl", BodyMode::WithoutBody);
    CHECK(without[0].body.empty());
    CHECK(without[0].claim.empty());
}

TEST_CASE("statement missing verdict_raw is an error") {
    test::TempDir dir("stmts");
    test::write(dir / "s.jsonl", nlohmann::json{{"id", "s9"}, {"title", "T"}}.dump() + "\n");
    CHECK_THROWS_AS(load_statements(dir / "s.jsonl", BodyMode::WithBody), ValidationError);
}

TEST_CASE("statement_text joins non-empty segments") {
    SupportingStatement s;
    s.title = "A";
    CHECK(statement_text(s) == "A");
    s.claim = "B";
    s.body = "C";
    CHECK(statement_text(s) == "A B C");
    s.claim = "";
    CHECK(statement_text(s) == "A C");
}

TEST_CASE("truncate_words keeps spacing between kept words") {
    CHECK(truncate_words("a  b c d", 2) == "a  b");
    CHECK(truncate_words("a b", 5) == "a b");
    CHECK(word_count("  x y\tz ") == 3);
}

TEST_CASE("timestamps round-trip") {
    const auto t = parse_utc_timestamp("2020-03-05T04:15:00Z");
    REQUIRE(t);
    CHECK(format_utc_timestamp(*t) == "2020-03-05T04:15:00Z");
    CHECK(parse_utc_timestamp("2020-03-05T04:15:00.250+00:00") == t);
    CHECK_FALSE(parse_utc_timestamp("2020-13-05T04:15:00Z"));
}

TEST_CASE("verdict normalization") {
    CHECK(normalize_verdict("Pants-Fire") == "pants-fire");
    CHECK(normalize_verdict("  Mostly  True ") == "mostly-true");
    CHECK(normalize_verdict("FALSE") == "false");
}

TEST_CASE("default mapping groups the published examples") {
    const auto m = VerdictMapping::defaults();
    CHECK(map_verdict("pants-fire", m) == Verdict::Fake);
    CHECK(map_verdict("Mostly True", m) == Verdict::Real);
    CHECK(map_verdict("unproven", m) == Verdict::Discard);
    CHECK(map_verdict("something new", m) == Verdict::Discard);
}

TEST_CASE("a term in two sets is a validation error") {
    CHECK_THROWS_AS(VerdictMapping({"false"}, {"False"}, {}), ValidationError);
}

TEST_CASE("grouping keeps fake and real statements and counts the rest") {
    const std::vector<std::string> raws{"false", "pants fire", "mostly-false", "not true", "true",
                                        "mostly true", "correct attribution", "satire", "legend",
                                        "unknown"};
    std::vector<SupportingStatement> stmts;
    for (std::size_t i = 0; i < raws.size(); ++i) {
        SupportingStatement s;
        s.statement_id = "s" + std::to_string(i);
        s.title = "t";
        s.verdict_raw = raws[i];
        s.source = i % 2 ? StatementSource::Snopes : StatementSource::Politifact;
        stmts.push_back(s);
    }
    const auto g = group_statements(stmts, VerdictMapping::defaults());
    CHECK(g.kept.size() == 7);
    CHECK(g.report.kept == 7);
    CHECK(g.report.discarded == 3);
    CHECK(g.report.unmapped == 0);
    CHECK(g.kept[0].verdict == Verdict::Fake);
    CHECK(g.kept[4].verdict == Verdict::Real);

    for (auto& s : stmts) s.verdict_raw = "satire";
    CHECK(group_statements(stmts, VerdictMapping::defaults()).kept.empty());
}
