#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "misinfo/error.hpp"
#include "misinfo/features.hpp"
#include "misinfo/models.hpp"
#include "test_util.hpp"

using namespace misinfo;

namespace {

struct Data {
    Matrix X;
    std::vector<Label> y;
};

// Fake when x0 + x1 > 0, with a margin around the boundary.
Data separable(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Data d{Matrix(n, 2), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const bool f = i % 2 == 0;
        const double a = uniform_real(rng) * 2.0;
        const double b = uniform_real(rng) * 2.0 - 1.0;
        d.X(i, 0) = f ? 0.5 + a : -0.5 - a;
        d.X(i, 1) = b;
        d.y.push_back(f ? Label::Fake : Label::Real);
    }
    return d;
}

double training_accuracy(const TrainedModel& m, const Data& d) {
    const auto p = predict(m, d.X, FeatureSignature::plain(d.X.cols()));
    std::size_t ok = 0;
    for (std::size_t i = 0; i < p.size(); ++i) ok += p[i].label == d.y[i];
    return static_cast<double>(ok) / static_cast<double>(p.size());
}

}  // namespace

TEST_CASE("tweet features from text") {
    auto t = test::tweet("t", "Go @a @b #x now!");
    const auto f = extract_tweet_features(t);
    CHECK(f.mention_count == 2);
    CHECK(f.hashtag_count == 1);
    CHECK(f.url_count == 0);
    CHECK(f.special_char_count == 4);
    CHECK(f.tweet_length == 16);

    const auto hi = extract_tweet_features(test::tweet("h", "hi"));
    const auto v = hi.values();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) CHECK(v[i] == 0);
    CHECK(hi.tweet_length == 2);

    t.is_reply = true;
    t.mention_count = 7;
    CHECK(extract_tweet_features(t).is_reply == 1);
    CHECK(extract_tweet_features(t).mention_count == 7);
}

TEST_CASE("user features") {
    UserProfile u;
    const auto z = extract_user_features(u).values();
    for (double x : z) CHECK(x == 0);
    u.is_verified = true;
    u.followers_count = 10;
    const auto f = extract_user_features(u);
    CHECK(f.is_verified == 1);
    CHECK(f.followers_count == 10);
}

TEST_CASE("scaler standardization") {
    Matrix m(2, 2);
    m(0, 0) = 0;
    m(1, 0) = 2;
    m(0, 1) = 5;
    m(1, 1) = 5;
    const auto s = Scaler::fit(m);
    Matrix t = m;
    s.transform_in_place(t);
    CHECK(t(0, 0) == doctest::Approx(-1));
    CHECK(t(1, 0) == doctest::Approx(1));
    CHECK(t(0, 1) == 0);
    CHECK(s.scale(1) == 1);
    Matrix again = m;
    Scaler::from_json(s.to_json()).transform_in_place(again);
    CHECK(again.data() == t.data());
}

TEST_CASE("assembled matrix carries a signature") {
    const std::vector<Tweet> tweets{test::tweet("a", "red apple"), test::tweet("b", "green pear")};
    const std::vector<std::string> docs{"red apple", "green pear"};
    const auto emb = TextEmbedder::tfidf(fit_tfidf(docs));
    const std::vector<Label> y{Label::Fake, Label::Real};
    const auto a = assemble_matrix(tweets, y, emb);
    CHECK(a.matrix.rows() == 2);
    CHECK(a.matrix.signature.total_dim() == kNumericFeatureCount + 4);
    CHECK(a.matrix.combined().cols() == kNumericFeatureCount + 4);
    CHECK(a.matrix.signature.text_kind == "tfidf");
}

TEST_CASE("separable data is fitted exactly by a tree") {
    const auto d = separable(20, 3);
    const auto m = train(ModelKind::DecisionTree, d.X, FeatureSignature::plain(2), d.y, {});
    CHECK(training_accuracy(m, d) == 1.0);
}

TEST_CASE("1-nearest neighbour reproduces training labels") {
    const auto d = separable(30, 4);
    ModelConfig cfg;
    cfg.knn_k = 1;
    const auto m = train(ModelKind::Knn, d.X, FeatureSignature::plain(2), d.y, cfg);
    const auto p = predict(m, d.X, FeatureSignature::plain(2));
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p[i].label == d.y[i]);
        CHECK((p[i].p_fake == 0.0 || p[i].p_fake == 1.0));
    }
}

TEST_CASE("gaussian NB boundary sits at the midpoint of symmetric classes") {
    // Identical spread around -1 and +3: the boundary is at 1.
    Matrix X(8, 1);
    std::vector<Label> y;
    const double offs[] = {-0.6, -0.2, 0.2, 0.6};
    for (int i = 0; i < 4; ++i) {
        X(static_cast<std::size_t>(i), 0) = -1 + offs[i];
        y.push_back(Label::Real);
        X(static_cast<std::size_t>(i + 4), 0) = 3 + offs[i];
        y.push_back(Label::Fake);
    }
    const auto nb = learners::GaussianNB::fit(X, y);
    const double at = 1.0;
    const double p = nb.p_fake(std::span<const double>(&at, 1));
    CHECK(p == doctest::Approx(0.5).epsilon(1e-9));
    const double left = 0.99, right = 1.01;
    CHECK(nb.p_fake(std::span<const double>(&left, 1)) < 0.5);
    CHECK(nb.p_fake(std::span<const double>(&right, 1)) > 0.5);
}

TEST_CASE("single-class training gives constant predictions") {
    Matrix X(4, 1);
    for (std::size_t i = 0; i < 4; ++i) X(i, 0) = static_cast<double>(i);
    const std::vector<Label> y(4, Label::Real);
    for (auto k : {ModelKind::Knn, ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::GaussianNB,
                   ModelKind::LogisticRegression}) {
        ModelConfig cfg;
        cfg.knn_k = 1;
        cfg.rf_trees = 5;
        const auto m = train(k, X, FeatureSignature::plain(1), y, cfg);
        for (const auto& p : predict(m, X, FeatureSignature::plain(1))) CHECK(p.p_fake == 0.0);
    }
}

TEST_CASE("random forest is deterministic for a seed") {
    const auto d = separable(60, 5);
    ModelConfig cfg;
    cfg.rf_trees = 15;
    cfg.seed = 11;
    const auto a = train(ModelKind::RandomForest, d.X, FeatureSignature::plain(2), d.y, cfg);
    const auto b = train(ModelKind::RandomForest, d.X, FeatureSignature::plain(2), d.y, cfg);
    const auto pa = predict(a, d.X, FeatureSignature::plain(2));
    const auto pb = predict(b, d.X, FeatureSignature::plain(2));
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].p_fake == pb[i].p_fake);
    CHECK(model_to_json(a) == model_to_json(b));
}

TEST_CASE("forest does not depend on the thread count") {
    const auto d = separable(80, 13);
    ModelConfig cfg;
    cfg.rf_trees = 12;
    cfg.seed = 5;
    std::vector<std::string> dumps;
    for (const char* threads : {"1", "3", "8"}) {
        ::setenv("MISINFO_THREADS", threads, 1);
        CHECK(learners::worker_count() == std::stoul(threads));
        dumps.push_back(model_to_json(train(ModelKind::RandomForest, d.X, FeatureSignature::plain(2), d.y, cfg)).dump());
    }
    ::unsetenv("MISINFO_THREADS");
    CHECK(dumps[0] == dumps[1]);
    CHECK(dumps[1] == dumps[2]);
}

TEST_CASE("signature mismatch is rejected") {
    const auto d = separable(20, 6);
    const auto m = train(ModelKind::DecisionTree, d.X, FeatureSignature::plain(2), d.y, {});
    CHECK_THROWS_AS(predict(m, d.X, FeatureSignature::plain(2, "tfidf")), ValidationError);
    Matrix wide(2, 3);
    CHECK_THROWS_AS(predict(m, wide, FeatureSignature::plain(2)), ValidationError);
}

TEST_CASE("model config validation") {
    ModelConfig c;
    c.knn_k = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_THROWS_AS(ModelConfig::from_json({{"no_such_key", 1}}), ValidationError);
    const auto back = ModelConfig::from_json({{"rf_trees", 7}});
    CHECK(back.rf_trees == 7);
    CHECK(back.knn_k == 5);
}

TEST_CASE("save, load and predict again") {
    test::TempDir dir("model");
    const auto d = separable(40, 7);
    ModelConfig cfg;
    cfg.rf_trees = 10;
    cfg.stack_folds = 3;
    for (auto kind : {ModelKind::Knn, ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::GaussianNB,
                      ModelKind::LogisticRegression, ModelKind::StackedEnsemble}) {
        const auto m = train(kind, d.X, FeatureSignature::plain(2), d.y, cfg);
        const auto path = dir / (std::string(to_string(kind)) + ".json");
        save_model(m, path);
        const auto back = load_model(path);
        CHECK(back.kind == kind);
        const auto p0 = predict(m, d.X, FeatureSignature::plain(2));
        const auto p1 = predict(back, d.X, FeatureSignature::plain(2));
        for (std::size_t i = 0; i < p0.size(); ++i) CHECK(p0[i].p_fake == p1[i].p_fake);
    }
}

TEST_CASE("corrupt files and future formats are rejected") {
    test::TempDir dir("model");
    test::write(dir / "bad.json", "{ this is not json");
    CHECK_THROWS_AS(load_model(dir / "bad.json"), ValidationError);

    const auto d = separable(20, 8);
    auto j = model_to_json(train(ModelKind::DecisionTree, d.X, FeatureSignature::plain(2), d.y, {}));
    j["format_version"] = kModelFormatVersion + 1;
    test::write(dir / "future.json", j.dump());
    try {
        load_model(dir / "future.json");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(std::to_string(kModelFormatVersion + 1)) != std::string::npos);
        CHECK(msg.find(std::to_string(kModelFormatVersion)) != std::string::npos);
    }
}

TEST_CASE("stratified folds cover every class in every fold") {
    std::vector<Label> y;
    for (int i = 0; i < 23; ++i) y.push_back(i < 15 ? Label::Fake : Label::Real);
    const auto folds = stratified_folds(y, 4, 9);
    for (int k = 0; k < 4; ++k) {
        int f = 0, r = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (folds[i] != k) continue;
            (y[i] == Label::Fake ? f : r) += 1;
        }
        CHECK(f >= 3);
        CHECK(r >= 1);
    }
    CHECK(stratified_folds(y, 4, 9) == folds);
    const std::vector<Label> tiny{Label::Fake, Label::Real, Label::Real};
    CHECK_THROWS_AS(stratified_folds(tiny, 2, 1), ValidationError);
}

TEST_CASE("stack meta-features are out-of-fold with one column per weak learner") {
    const auto d = separable(50, 10);
    ModelConfig cfg;
    cfg.rf_trees = 8;
    cfg.stack_folds = 5;
    const std::vector<ModelKind> weak{ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::GaussianNB};
    const auto st = train_stack_detailed(weak, d.X, FeatureSignature::plain(2), d.y, cfg);
    CHECK(st.meta_features.rows() == 50);
    CHECK(st.meta_features.cols() == 3);
    CHECK(st.folds.size() == 50);
    for (double v : st.meta_features.data()) CHECK((v >= 0.0 && v <= 1.0));
    CHECK(training_accuracy(st.model, d) >= 0.95);
}

TEST_CASE("stack over identical weak learners keeps their labels") {
    const auto d = separable(40, 12);
    ModelConfig cfg;
    cfg.stack_folds = 4;
    const std::vector<ModelKind> weak{ModelKind::Knn, ModelKind::Knn};
    const auto m = train_stack(weak, d.X, FeatureSignature::plain(2), d.y, cfg);
    const auto knn = train(ModelKind::Knn, d.X, FeatureSignature::plain(2), d.y, cfg);
    const auto ps = predict(m, d.X, FeatureSignature::plain(2));
    const auto pk = predict(knn, d.X, FeatureSignature::plain(2));
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(ps[i].label == pk[i].label);
        for (std::size_t j = 0; j < ps.size(); ++j) {
            if (pk[i].p_fake < pk[j].p_fake) CHECK(ps[i].p_fake <= ps[j].p_fake);
        }
    }
}
