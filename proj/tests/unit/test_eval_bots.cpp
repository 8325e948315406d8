#include <doctest.h>

#include <algorithm>

#include "misinfo/botscan.hpp"
#include "misinfo/error.hpp"
#include "misinfo/eval.hpp"
#include "test_util.hpp"

using namespace misinfo;

TEST_CASE("stratified 80/20 split arithmetic") {
    std::vector<Label> y;
    for (int i = 0; i < 100; ++i) y.push_back(i < 80 ? Label::Fake : Label::Real);
    const auto s = split_80_20(y, 5);
    std::size_t f = 0, r = 0;
    for (auto i : s.test) (y[i] == Label::Fake ? f : r) += 1;
    CHECK(f == 16);
    CHECK(r == 4);
    CHECK(s.train.size() == 80);
    CHECK(std::is_sorted(s.test.begin(), s.test.end()));
    const auto again = split_80_20(y, 5);
    CHECK(again.test == s.test);
    CHECK(again.train == s.train);
    const std::vector<Label> lone{Label::Fake, Label::Fake, Label::Fake, Label::Fake, Label::Real};
    CHECK_THROWS_AS(split_80_20(lone, 1), ValidationError);
}

TEST_CASE("confusion counts") {
    const std::vector<Label> gold{Label::Fake, Label::Fake, Label::Fake, Label::Real, Label::Real};
    const std::vector<Label> all_fake(5, Label::Fake);
    const auto cm = confusion(all_fake, gold);
    CHECK(cm == ConfusionMatrix{3, 2, 0, 0});
    const auto perfect = confusion(gold, gold);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);
    CHECK(confusion({}, {}).total() == 0);
    const std::vector<Label> short_pred{Label::Fake};
    CHECK_THROWS_AS(confusion(short_pred, gold), ValidationError);
}

TEST_CASE("metrics from a confusion matrix") {
    const auto m = metrics(ConfusionMatrix{96, 20, 4, 80});
    CHECK(m.fake.recall == doctest::Approx(0.96));
    CHECK(m.fpr_paper == doctest::Approx(0.04));
    CHECK(m.fpr_standard == doctest::Approx(0.2));
    CHECK(m.flags.empty());

    const auto p = metrics(ConfusionMatrix{10, 0, 0, 10});
    CHECK(p.fake.precision == 1.0);
    CHECK(p.fake.recall == 1.0);
    CHECK(p.fake.f1 == 1.0);
    CHECK(p.fpr_paper == 0.0);
    CHECK(p.fpr_standard == 0.0);

    const auto empty = metrics(ConfusionMatrix{});
    CHECK(empty.accuracy == 0.0);
    CHECK(std::find(empty.flags.begin(), empty.flags.end(), "accuracy") != empty.flags.end());
}

TEST_CASE("average precision of a constant scorer equals prevalence") {
    const std::vector<double> p(10, 0.3);
    std::vector<Label> gold;
    for (int i = 0; i < 10; ++i) gold.push_back(i % 2 ? Label::Real : Label::Fake);
    const auto m = metrics(ConfusionMatrix{5, 5, 0, 0}, p, gold);
    REQUIRE(m.average_precision);
    CHECK(*m.average_precision == doctest::Approx(0.5));
    REQUIRE(m.curve);
    CHECK(m.curve->points.size() == 1);
    CHECK(pr_curve_csv(*m.curve).find("threshold") != std::string::npos);
}

TEST_CASE("pr curve points descend in threshold") {
    const std::vector<double> p{0.9, 0.8, 0.8, 0.1};
    const std::vector<Label> g{Label::Fake, Label::Real, Label::Fake, Label::Real};
    const auto c = pr_curve(p, g);
    REQUIRE(c.points.size() == 3);
    CHECK(c.points[0].precision == 1.0);
    CHECK(c.points[0].recall == 0.5);
    CHECK(c.points[1].precision == doctest::Approx(2.0 / 3.0));
    CHECK(c.points[1].recall == 1.0);
    CHECK(average_precision(c) == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));
}

TEST_CASE("model comparison ordering") {
    auto with_f1 = [](double f1) {
        MetricsReport r;
        r.weighted.f1 = f1;
        return r;
    };
    const auto t = compare_models({{"b", with_f1(0.8)}, {"a", with_f1(0.9)}});
    CHECK(t[0].name == "a");
    CHECK(compare_models({{"only", with_f1(0.1)}}).size() == 1);
    const auto tie = compare_models({{"zeta", with_f1(0.7)}, {"alpha", with_f1(0.7)}});
    CHECK(tie[0].name == "alpha");
    CHECK(render_table(tie).find("alpha") != std::string::npos);
}

TEST_CASE("bot classification boundaries") {
    const ScoreTable s{{"a", 0.49}, {"b", 0.5}, {"c", 0.91}};
    CHECK(classify_accounts(s, 0.5).bots.size() == 2);
    CHECK(classify_accounts(s, 1.01).bots.empty());
    CHECK(classify_accounts(s, 0.0).bots.size() == 3);
}

namespace {

LabelRecord label(std::string tweet, Label l) {
    LabelRecord r;
    r.tweet_id = std::move(tweet);
    r.label = l;
    return r;
}

}  // namespace

TEST_CASE("fake bot fraction") {
    std::vector<Tweet> tweets;
    std::vector<LabelRecord> labels;
    ScoreTable scores;
    for (int i = 0; i < 100; ++i) {
        const auto user = "u" + std::to_string(i);
        tweets.push_back(test::tweet("t" + std::to_string(i), "x", user));
        labels.push_back(label("t" + std::to_string(i), Label::Fake));
        scores[user] = i < 10 ? 0.8 : 0.2;
    }
    const auto r = fake_bot_fraction(labels, tweets, scores, 0.5);
    CHECK(r.fraction == doctest::Approx(0.10));
    CHECK(r.bot_generated_fake_count == 10);
    CHECK(r.unique_bot_accounts == 10);

    const auto none = fake_bot_fraction({}, tweets, scores, 0.5);
    CHECK(none.fraction == 0.0);
    CHECK(none.fraction_undefined);

    std::vector<Tweet> one_author;
    for (int i = 0; i < 5; ++i) one_author.push_back(test::tweet("t" + std::to_string(i), "x", "u0"));
    const std::vector<LabelRecord> five(labels.begin(), labels.begin() + 5);
    const auto all = fake_bot_fraction(five, one_author, scores, 0.5);
    CHECK(all.fraction == 1.0);
    CHECK(all.unique_bot_accounts == 1);

    const std::vector<LabelRecord> stray{label("nope", Label::Fake)};
    CHECK_THROWS_AS(fake_bot_fraction(stray, tweets, scores), ValidationError);
}

TEST_CASE("threshold sweep counts") {
    const ScoreTable s{{"a", 0.55}, {"b", 0.65}, {"c", 0.95}};
    const std::vector<double> th{0.5, 0.6, 0.7, 0.8, 0.9};
    const auto rows = threshold_sweep(s, th);
    std::vector<std::size_t> counts;
    for (const auto& r : rows) counts.push_back(r.bot_count);
    CHECK(counts == std::vector<std::size_t>{3, 2, 1, 1, 1});
    for (const auto& r : threshold_sweep({}, th)) CHECK(r.bot_count == 0);
    const std::vector<double> down{0.9, 0.5};
    CHECK_THROWS_AS(threshold_sweep(s, down), ValidationError);
}

TEST_CASE("longitudinal comparison") {
    const ScoreTable a{{"u1", 0.6}, {"u2", 0.7}, {"u3", 0.9}};
    const ScoreTable b{{"u1", 0.2}, {"u2", 0.8}};
    const StatusTable st{{"u1", AccountState::Active}, {"u2", AccountState::Active},
                         {"u3", AccountState::DeletedOrSuspended}};
    const std::vector<double> th{0.5};
    const auto rows = longitudinal_diff(a, b, st, th);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].bots_a == 3);
    CHECK(rows[0].still_bot == 1);
    CHECK(rows[0].now_human == 1);
    CHECK(rows[0].deleted == 1);

    const auto same = longitudinal_diff(a, a, {}, th);
    CHECK(same[0].still_bot_pct == doctest::Approx(100.0));

    const auto missing = longitudinal_diff(a, b, {}, th);
    CHECK(missing[0].deleted == 1);
    CHECK(missing[0].missing == 1);

    StatusTable active_unscored = st;
    active_unscored["u3"] = AccountState::Active;
    CHECK_THROWS_AS(longitudinal_diff(a, b, active_unscored, th), ValidationError);
}

TEST_CASE("bot score files") {
    test::TempDir dir("bots");
    test::write(dir / "s.jsonl", R"({"user_id":"u1","bot_score":0.4,"snapshot_id":"A"}
{"user_id":"u1","bot_score":0.6,"snapshot_id":"B"}
)");
    const auto recs = load_bot_scores(dir / "s.jsonl");
    CHECK(snapshot_scores(recs, "B").at("u1") == 0.6);
    test::write(dir / "range.jsonl", R"({"user_id":"u1","bot_score":1.4,"snapshot_id":"A"}
)");
    CHECK_THROWS_AS(load_bot_scores(dir / "range.jsonl"), ValidationError);
    test::write(dir / "dup.jsonl", R"({"user_id":"u1","bot_score":0.4,"snapshot_id":"A"}
{"user_id":"u1","bot_score":0.5,"snapshot_id":"A"}
)");
    CHECK_THROWS_AS(load_bot_scores(dir / "dup.jsonl"), ValidationError);
    test::write(dir / "st.jsonl", R"({"user_id":"u1","status":"deleted_or_suspended","snapshot_id":"B"}
)");
    const auto st = load_account_status(dir / "st.jsonl");
    CHECK(snapshot_status(st, "B").at("u1") == AccountState::DeletedOrSuspended);
}
