#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "misinfo/corpus.hpp"
#include "misinfo/matrix.hpp"
#include "misinfo/textvec.hpp"

namespace misinfo {

inline constexpr std::size_t kTweetFeatureCount = 9;
inline constexpr std::size_t kUserFeatureCount = 5;
inline constexpr std::size_t kNumericFeatureCount = kTweetFeatureCount + kUserFeatureCount;

/// Column names in frozen order: 9 tweet-level then 5 user-level.
const std::array<std::string, kNumericFeatureCount>& numeric_feature_names();

struct TweetFeatures {
    double mention_count = 0;
    double hashtag_count = 0;
    double url_count = 0;
    double favourite_count = 0;
    double retweet_count = 0;
    double media_count = 0;
    double is_reply = 0;
    double special_char_count = 0;
    double tweet_length = 0;

    std::array<double, kTweetFeatureCount> values() const;
};

struct UserFeatures {
    double is_verified = 0;
    double followers_count = 0;
    double friends_count = 0;
    double favourites_count = 0;
    double statuses_count = 0;

    std::array<double, kUserFeatureCount> values() const;
};

/// Entity counts come from the record when present, otherwise from the text:
/// whitespace tokens starting with '@', '#', or "http". Special characters are
/// code points that are neither alphanumeric nor whitespace; length is in code points.
TweetFeatures extract_tweet_features(const Tweet& t);
UserFeatures extract_user_features(const UserProfile& u);

/// Per-column standardization fitted on training rows (population std; a
/// zero-variance column gets divisor 1).
class Scaler {
public:
    static Scaler fit(const Matrix& numeric);

    std::size_t columns() const { return mean_.size(); }
    double mean(std::size_t c) const { return mean_[c]; }
    double scale(std::size_t c) const { return scale_[c]; }

    void transform_in_place(Matrix& numeric) const;

    nlohmann::json to_json() const;
    static Scaler from_json(const nlohmann::json& j);

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

/// Frozen column layout. Models refuse matrices with a different signature.
struct FeatureSignature {
    std::vector<std::string> numeric_columns;
    std::string text_kind;  // "tfidf", "store", or "none"
    std::size_t text_dim = 0;
    std::string text_fingerprint;  // vocabulary digest for tfidf

    std::size_t total_dim() const { return numeric_columns.size() + text_dim; }
    bool operator==(const FeatureSignature&) const = default;

    nlohmann::json to_json() const;
    static FeatureSignature from_json(const nlohmann::json& j);
    /// Signature for an anonymous matrix (e.g. stacked meta-features).
    static FeatureSignature plain(std::size_t cols, std::string kind = "none");
};

struct FeatureMatrix {
    std::vector<std::string> row_ids;
    Matrix numeric;     // n x 14, standardized
    Matrix text;        // n x D, unscaled
    std::vector<Label> labels;  // empty when unlabeled
    FeatureSignature signature;

    std::size_t rows() const { return row_ids.size(); }
    /// numeric | text, row by row.
    Matrix combined() const;
};

struct AssembledFeatures {
    FeatureMatrix matrix;
    Scaler scaler;
};

/// `labels` is empty or aligned with `tweets`. With no scaler given one is fitted
/// on these rows; otherwise the given statistics are applied.
AssembledFeatures assemble_matrix(std::span<const Tweet> tweets, std::span<const Label> labels,
                                  const TextEmbedder& text_backend,
                                  const std::optional<Scaler>& scaler = std::nullopt);

/// Raw (unscaled) 14-column numeric block.
Matrix numeric_block(std::span<const Tweet> tweets);

}  // namespace misinfo
