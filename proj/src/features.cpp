#include "misinfo/features.hpp"

#include <cmath>

#include "misinfo/error.hpp"
#include "misinfo/unicode.hpp"

namespace misinfo {

const std::array<std::string, kNumericFeatureCount>& numeric_feature_names() {
    static const std::array<std::string, kNumericFeatureCount> names{
        "mention_count",   "hashtag_count",   "url_count",         "favourite_count",
        "retweet_count",   "media_count",     "is_reply",          "special_char_count",
        "tweet_length",    "user_is_verified", "user_followers_count", "user_friends_count",
        "user_favourites_count", "user_statuses_count"};
    return names;
}

std::array<double, kTweetFeatureCount> TweetFeatures::values() const {
    return {mention_count, hashtag_count,  url_count,          favourite_count, retweet_count,
            media_count,   is_reply,       special_char_count, tweet_length};
}

std::array<double, kUserFeatureCount> UserFeatures::values() const {
    return {is_verified, followers_count, friends_count, favourites_count, statuses_count};
}

TweetFeatures extract_tweet_features(const Tweet& t) {
    std::int64_t mentions = 0, hashtags = 0, urls = 0;
    if (!t.mention_count || !t.hashtag_count || !t.url_count) {
        for (const auto tok : unicode::split_ws(t.text)) {
            if (tok.front() == '@') ++mentions;
            else if (tok.front() == '#') ++hashtags;
            else if (tok.starts_with("http")) ++urls;
        }
    }
    TweetFeatures f;
    f.mention_count = static_cast<double>(t.mention_count.value_or(mentions));
    f.hashtag_count = static_cast<double>(t.hashtag_count.value_or(hashtags));
    f.url_count = static_cast<double>(t.url_count.value_or(urls));
    f.media_count = static_cast<double>(t.media_count.value_or(0));
    f.favourite_count = static_cast<double>(t.favourite_count);
    f.retweet_count = static_cast<double>(t.retweet_count);
    f.is_reply = t.is_reply ? 1.0 : 0.0;
    const auto cps = unicode::decode(t.text);
    std::size_t special = 0;
    for (char32_t c : cps) {
        if (!unicode::is_alnum(c) && !unicode::is_space(c)) ++special;
    }
    f.special_char_count = static_cast<double>(special);
    f.tweet_length = static_cast<double>(cps.size());
    return f;
}

UserFeatures extract_user_features(const UserProfile& u) {
    return {u.is_verified ? 1.0 : 0.0, static_cast<double>(u.followers_count),
            static_cast<double>(u.friends_count), static_cast<double>(u.favourites_count),
            static_cast<double>(u.statuses_count)};
}

Scaler Scaler::fit(const Matrix& numeric) {
    Scaler s;
    const std::size_t n = numeric.rows();
    s.mean_.assign(numeric.cols(), 0.0);
    s.scale_.assign(numeric.cols(), 1.0);
    if (n == 0) return s;
    for (std::size_t c = 0; c < numeric.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += numeric(r, c);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = numeric(r, c) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        s.mean_[c] = mean;
        s.scale_[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

void Scaler::transform_in_place(Matrix& numeric) const {
    if (numeric.cols() != mean_.size()) {
        throw ValidationError("scaler fitted on " + std::to_string(mean_.size()) +
                              " columns, got " + std::to_string(numeric.cols()));
    }
    for (std::size_t r = 0; r < numeric.rows(); ++r) {
        for (std::size_t c = 0; c < numeric.cols(); ++c) {
            numeric(r, c) = (numeric(r, c) - mean_[c]) / scale_[c];
        }
    }
}

nlohmann::json Scaler::to_json() const { return {{"mean", mean_}, {"scale", scale_}}; }

Scaler Scaler::from_json(const nlohmann::json& j) {
    Scaler s;
    try {
        s.mean_ = j.at("mean").get<std::vector<double>>();
        s.scale_ = j.at("scale").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scaler: ") + e.what());
    }
    if (s.mean_.size() != s.scale_.size()) throw ValidationError("scaler mean/scale size mismatch");
    for (double v : s.scale_) {
        if (!(v > 0.0)) throw ValidationError("scaler divisor must be positive");
    }
    return s;
}

nlohmann::json FeatureSignature::to_json() const {
    return {{"numeric_columns", numeric_columns}, {"text_kind", text_kind}, {"text_dim", text_dim},
            {"text_fingerprint", text_fingerprint}};
}

FeatureSignature FeatureSignature::from_json(const nlohmann::json& j) {
    FeatureSignature s;
    try {
        s.numeric_columns = j.at("numeric_columns").get<std::vector<std::string>>();
        s.text_kind = j.at("text_kind").get<std::string>();
        s.text_dim = j.at("text_dim").get<std::size_t>();
        s.text_fingerprint = j.value("text_fingerprint", std::string{});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed feature signature: ") + e.what());
    }
    return s;
}

FeatureSignature FeatureSignature::plain(std::size_t cols, std::string kind) {
    FeatureSignature s;
    for (std::size_t c = 0; c < cols; ++c) s.numeric_columns.push_back("f" + std::to_string(c));
    s.text_kind = std::move(kind);
    return s;
}

Matrix FeatureMatrix::combined() const {
    Matrix out(rows(), numeric.cols() + text.cols());
    for (std::size_t r = 0; r < rows(); ++r) {
        auto dst = out.row(r);
        const auto a = numeric.row(r);
        const auto b = text.row(r);
        std::copy(a.begin(), a.end(), dst.begin());
        std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
    }
    return out;
}

Matrix numeric_block(std::span<const Tweet> tweets) {
    Matrix m(tweets.size(), kNumericFeatureCount);
    for (std::size_t r = 0; r < tweets.size(); ++r) {
        const auto tf = extract_tweet_features(tweets[r]).values();
        const auto uf = extract_user_features(tweets[r].user).values();
        auto row = m.row(r);
        std::copy(tf.begin(), tf.end(), row.begin());
        std::copy(uf.begin(), uf.end(), row.begin() + kTweetFeatureCount);
    }
    return m;
}

AssembledFeatures assemble_matrix(std::span<const Tweet> tweets, std::span<const Label> labels,
                                  const TextEmbedder& text_backend,
                                  const std::optional<Scaler>& scaler) {
    if (!labels.empty() && labels.size() != tweets.size()) {
        throw ValidationError("labels (" + std::to_string(labels.size()) +
                              ") not aligned with tweets (" + std::to_string(tweets.size()) + ")");
    }
    AssembledFeatures out;
    auto& fm = out.matrix;
    fm.numeric = numeric_block(tweets);
    out.scaler = scaler ? *scaler : Scaler::fit(fm.numeric);
    out.scaler.transform_in_place(fm.numeric);

    const std::size_t dim = text_backend.dimension();
    fm.text = Matrix(tweets.size(), dim);
    for (std::size_t r = 0; r < tweets.size(); ++r) {
        fm.row_ids.push_back(tweets[r].tweet_id);
        const auto e = text_backend.embed(tweets[r].tweet_id, tweets[r].text);
        auto row = fm.text.row(r);
        if (const auto* sv = std::get_if<SparseVector>(&e)) {
            for (const auto& [i, w] : sv->entries) row[i] = w;
        } else {
            const auto& dv = std::get<DenseVector>(e);
            std::copy(dv.begin(), dv.end(), row.begin());
        }
    }
    fm.labels.assign(labels.begin(), labels.end());
    const auto& names = numeric_feature_names();
    fm.signature.numeric_columns.assign(names.begin(), names.end());
    fm.signature.text_kind = std::string(to_string(text_backend.kind()));
    fm.signature.text_dim = dim;
    fm.signature.text_fingerprint = text_backend.fingerprint();
    return out;
}

}  // namespace misinfo
