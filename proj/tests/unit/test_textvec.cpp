#include <doctest.h>

#include <cmath>

#include "misinfo/error.hpp"
#include "misinfo/textvec.hpp"
#include "test_util.hpp"

using namespace misinfo;

TEST_CASE("tokenizer rules") {
    CHECK(tokenize("COVID-19 Vaccine!") == TokenStream{"covid", "19", "vaccine"});
    CHECK(tokenize("see https://x.co/ab now") == TokenStream{"see", "now"});
    CHECK(tokenize("@WHO #vaccine works") == TokenStream{"who", "vaccine", "works"});
    CHECK(tokenize("a I to") == TokenStream{"to"});
    CHECK(tokenize("ÉTÉ café") == TokenStream{"été", "café"});
}

TEST_CASE("smoothed idf on a two-document corpus") {
    const std::vector<std::string> docs{"a b", "b c"};
    TokenizerOptions one;
    one.min_token_length = 1;
    const auto v = fit_tfidf(docs, std::nullopt, one);
    REQUIRE(v.size() == 3);
    CHECK(v.document_count() == 2);
    const auto a = *v.index_of("a");
    const auto b = *v.index_of("b");
    CHECK(v.document_frequency(a) == 1);
    CHECK(v.document_frequency(b) == 2);
    CHECK(v.idf(b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(v.idf(a) == doctest::Approx(std::log(1.5) + 1.0));

    const auto capped = fit_tfidf(docs, 1, one);
    REQUIRE(capped.size() == 1);
    CHECK(capped.terms()[0] == "b");
}

TEST_CASE("single document gives idf 1 for every term") {
    const std::vector<std::string> docs{"alpha beta gamma"};
    const auto v = fit_tfidf(docs);
    for (std::uint32_t i = 0; i < v.size(); ++i) CHECK(v.idf(i) == doctest::Approx(1.0));
}

TEST_CASE("fit rejects corpora with no tokens") {
    const std::vector<std::string> empty;
    CHECK_THROWS_AS(fit_tfidf(empty), ValidationError);
    const std::vector<std::string> blank{"", "!!"};
    CHECK_THROWS_AS(fit_tfidf(blank), ValidationError);
}

TEST_CASE("transform normalizes and skips unknown terms") {
    const std::vector<std::string> docs{"xx", "yy zz"};
    const auto v = fit_tfidf(docs);
    const auto one = transform_tfidf("xx", v);
    REQUIRE(one.entries.size() == 1);
    CHECK(one.entries[0].second == doctest::Approx(1.0));
    CHECK(transform_tfidf("unseen words", v).entries.empty());
    const auto two = transform_tfidf("yy zz", v);
    REQUIRE(two.entries.size() == 2);
    CHECK(two.entries[0].second == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(two.entries[1].second == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("cosine similarity") {
    const std::vector<double> a{1, 1}, b{1, 0}, c{0, 1};
    using S = std::span<const double>;
    CHECK(cosine_similarity(S(a), S(a)) == doctest::Approx(1.0));
    CHECK(cosine_similarity(S(b), S(c)) == 0.0);
    CHECK(cosine_similarity(S(a), S(b)) == doctest::Approx(0.70710678118654752));
    const std::vector<double> d{1, 2, 3};
    CHECK_THROWS_AS(cosine_similarity(S(a), S(d)), ValidationError);

    SparseVector s1{4, {{0, 1.0}, {2, 1.0}}};
    SparseVector s2{4, {{1, 1.0}, {3, 1.0}}};
    CHECK(cosine_similarity(s1, s2) == 0.0);
    CHECK(cosine_similarity(s1, s1) == doctest::Approx(1.0));
    SparseVector s3{5, {}};
    CHECK_THROWS_AS(cosine_similarity(s1, s3), ValidationError);
}

TEST_CASE("embedding store file") {
    test::TempDir dir("emb");
    test::write(dir / "e.jsonl", R"({"id":"a","vec":[1,0,0,0]}
{"id":"b","vec":[0,1,0,0]}
{"id":"c","vec":[0,0,1,0]}
)");
    const auto st = load_embeddings(dir / "e.jsonl");
    CHECK(st.dimension() == 4);
    CHECK(st.size() == 3);
    CHECK(st.at("b")[1] == 1.0);
    CHECK_THROWS_AS(st.at("zz"), ValidationError);

    test::write(dir / "mixed.jsonl", R"({"id":"a","vec":[1,0,0,0]}
{"id":"b","vec":[0,1,0,0,0]}
)");
    CHECK_THROWS_AS(load_embeddings(dir / "mixed.jsonl"), ValidationError);
    test::write(dir / "dup.jsonl", R"({"id":"a","vec":[1]}
{"id":"a","vec":[2]}
)");
    CHECK_THROWS_AS(load_embeddings(dir / "dup.jsonl"), ValidationError);
    test::write(dir / "empty.jsonl", "");
    CHECK_THROWS_AS(load_embeddings(dir / "empty.jsonl"), ValidationError);
}

TEST_CASE("text embedder delegates to its backend") {
    const std::vector<std::string> docs{"red apple", "green pear"};
    auto vocab = fit_tfidf(docs);
    const auto direct = transform_tfidf("red pear", vocab);
    const auto e = TextEmbedder::tfidf(vocab);
    const auto via = std::get<SparseVector>(e.embed("any", "red pear"));
    CHECK(via.entries == direct.entries);
    CHECK_FALSE(e.fingerprint().empty());

    EmbeddingStore st;
    st.insert("k", {0.5, 0.5});
    const auto s = TextEmbedder::store(st);
    CHECK(std::get<DenseVector>(s.embed("k", "ignored")) == DenseVector{0.5, 0.5});
    CHECK_THROWS_AS(s.embed("missing", "x"), ValidationError);
}

TEST_CASE("vocabulary json round-trip") {
    const std::vector<std::string> docs{"one two two", "two three"};
    const auto v = fit_tfidf(docs);
    const auto back = Vocabulary::from_json(v.to_json());
    CHECK(back.terms() == v.terms());
    for (std::uint32_t i = 0; i < v.size(); ++i) CHECK(back.idf(i) == v.idf(i));
}
