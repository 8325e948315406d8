#include <doctest.h>

#include <cmath>

#include "misinfo/error.hpp"
#include "misinfo/retrieval.hpp"
#include "test_util.hpp"

using namespace misinfo;

namespace {

std::vector<SupportingStatement> docs(const std::vector<std::string>& titles) {
    std::vector<SupportingStatement> out;
    for (std::size_t i = 0; i < titles.size(); ++i) {
        out.push_back(test::statement("s" + std::to_string(i), titles[i],
                                      i % 2 ? Verdict::Real : Verdict::Fake));
    }
    return out;
}

}  // namespace

TEST_CASE("index statistics") {
    const auto idx = build_index(docs({"aa bb cc", "aa bb cc dd ee"}));
    CHECK(idx.document_count() == 2);
    CHECK(idx.average_doc_length() == 4.0);
    CHECK(build_index(docs({"xx yy zz"})).average_doc_length() == 3.0);
    CHECK_THROWS_AS(build_index(docs({"!", "?"})), ValidationError);
    CHECK_THROWS_AS(build_index(docs({"aa"}), Bm25Params{0.0, 0.75}), ValidationError);
    CHECK_THROWS_AS(build_index(docs({"aa"}), Bm25Params{1.2, 1.5}), ValidationError);
}

TEST_CASE("postings count term occurrences per document") {
    const std::vector<std::string> titles{"aa bb aa", "bb cc", "aa aa aa", "dd", "cc bb aa"};
    const auto idx = build_index(docs(titles));
    for (const std::string term : {"aa", "bb", "cc", "dd"}) {
        const auto pl = idx.postings(term);
        std::size_t k = 0;
        for (std::size_t d = 0; d < titles.size(); ++d) {
            std::uint32_t tf = 0;
            for (const auto& t : tokenize(titles[d])) tf += t == term;
            if (tf == 0) continue;
            REQUIRE(k < pl.size());
            CHECK(pl[k].doc == d);
            CHECK(pl[k].tf == tf);
            ++k;
        }
        CHECK(k == pl.size());
    }
    CHECK(idx.postings("zz").empty());
}

TEST_CASE("bm25 single-document hand computation") {
    const auto idx = build_index(docs({"covid vaccine"}));
    const double expected = std::log(1.0 + 0.5 / 1.5);
    CHECK(bm25_score({"covid"}, 0, idx) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.2877).epsilon(1e-4));
    CHECK(bm25_score({"absent"}, 0, idx) == 0.0);
    CHECK(bm25_score({}, 0, idx) == 0.0);
    CHECK_THROWS_AS(bm25_score({"covid"}, 3, idx), ValidationError);
}

TEST_CASE("repeated query terms count once") {
    const auto idx = build_index(docs({"aa bb", "bb cc", "cc dd"}));
    CHECK(bm25_score({"aa", "aa"}, 0, idx) == bm25_score({"aa"}, 0, idx));
    const auto all = bm25_score_all({"bb", "cc"}, idx);
    for (std::size_t d = 0; d < 3; ++d) CHECK(all[d] == doctest::Approx(bm25_score({"bb", "cc"}, d, idx)));
}

TEST_CASE("candidate padding and ties") {
    const auto two = build_index(docs({"aa bb", "cc dd"}));
    const auto c2 = top_n_candidates("aa", two, 50);
    REQUIRE(c2.size() == 2);
    CHECK(c2[0].doc_index == 0);
    CHECK(c2[1].score == 0.0);

    const auto five = build_index(docs({"zz", "aa bb", "aa aa bb cc", "cc", "dd"}));
    const auto best = top_n_candidates("aa cc", five, 1);
    REQUIRE(best.size() == 1);
    const auto all = bm25_score_all(tokenize("aa cc"), five);
    const auto argmax = static_cast<std::size_t>(std::max_element(all.begin(), all.end()) - all.begin());
    CHECK(best[0].doc_index == argmax);

    const auto same = build_index(docs({"aa", "aa", "aa", "aa"}));
    const auto tied = top_n_candidates("aa", same, 3);
    REQUIRE(tied.size() == 3);
    CHECK(tied[0].doc_index == 0);
    CHECK(tied[1].doc_index == 1);
    CHECK(tied[2].doc_index == 2);
}

TEST_CASE("external scores rank the top three") {
    const auto stmts = docs({"aa", "bb", "cc", "dd", "ee"});
    const auto idx = build_index(stmts);
    ExternalScores ext;
    const double scores[] = {2, 7, 9, 7, 1};
    std::vector<Candidate> cand;
    for (std::size_t i = 0; i < 5; ++i) {
        ext.insert("t1", stmts[i].statement_id, scores[i]);
        cand.push_back({i, 0.0});
    }
    // s1 and s3 both have 7; the id breaks the tie.
    const auto tr = rank_top3("t1", cand, idx, RelevanceScorer::from(ext));
    CHECK(tr.top3[0].statement_id == "s2");
    CHECK(tr.top3[1].statement_id == "s1");
    CHECK(tr.top3[2].statement_id == "s3");
    CHECK(tr.top3[0].relevance == 9.0);
    CHECK(tr.top3[2].rank == 3);

    const std::vector<Candidate> short_list{{0, 1.0}, {1, 0.5}};
    CHECK_THROWS_AS(rank_top3("t1", short_list, idx, RelevanceScorer::bm25()), ValidationError);

    ExternalScores partial;
    partial.insert("t1", "s0", 1.0);
    CHECK_THROWS_AS(rank_top3("t1", cand, idx, RelevanceScorer::from(partial)), ValidationError);
}

TEST_CASE("bm25 scorer keeps candidate order") {
    const auto stmts = docs({"aa bb", "aa", "bb cc", "aa cc dd", "ee"});
    const auto idx = build_index(stmts);
    const auto cand = top_n_candidates("aa bb cc", idx, 50);
    REQUIRE(cand.size() >= 3);
    const auto tr = rank_top3("t", cand, idx, RelevanceScorer::bm25());
    for (std::size_t i = 0; i < 3; ++i) CHECK(tr.top3[i].doc_index == cand[i].doc_index);
}

TEST_CASE("relevance score file validation") {
    test::TempDir dir("rel");
    test::write(dir / "ok.jsonl", R"({"tweet_id":"t","statement_id":"a","score":1}
{"tweet_id":"t","statement_id":"b","score":0.5}
{"tweet_id":"u","statement_id":"a","score":2}
)");
    const auto s = load_relevance_scores(dir / "ok.jsonl");
    CHECK(s.size() == 3);
    CHECK(s.find("t", "b") == 0.5);
    CHECK_FALSE(s.find("u", "b"));
    test::write(dir / "dup.jsonl", R"({"tweet_id":"t","statement_id":"a","score":1}
{"tweet_id":"t","statement_id":"a","score":2}
)");
    CHECK_THROWS_AS(load_relevance_scores(dir / "dup.jsonl"), ValidationError);
    test::write(dir / "neg.jsonl", R"({"tweet_id":"t","statement_id":"a","score":-1}
)");
    CHECK_THROWS_AS(load_relevance_scores(dir / "neg.jsonl"), ValidationError);
}

TEST_CASE("retrieve_and_rank skips tweets without enough candidates") {
    const auto stmts = docs({"aa", "bb"});
    const auto idx = build_index(stmts);
    const std::vector<Tweet> tweets{test::tweet("t1", "aa")};
    const auto out = retrieve_and_rank(tweets, idx, RelevanceScorer::bm25());
    CHECK(out.results.empty());
    REQUIRE(out.skipped.size() == 1);
    CHECK(out.skipped[0].tweet_id == "t1");
}
