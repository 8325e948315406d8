#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "misinfo/corpus.hpp"
#include "misinfo/textvec.hpp"

namespace misinfo {

/// Which statement text is embedded when comparing against tweets.
enum class StatementField { Title, FullText };

std::string_view to_string(StatementField f);
StatementField parse_statement_field(std::string_view s);

/// Text handed to the embedder for a statement.
std::string embedding_text(const SupportingStatement& s, StatementField field);

enum class AnnotationMethod { TrustedSource, CosineMatch };

struct AnnotationRecord {
    std::string tweet_id;
    Label label = Label::Real;
    AnnotationMethod method = AnnotationMethod::CosineMatch;
    std::optional<std::string> matched_statement_id;
    std::optional<double> similarity;
};

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord annotation_from_json(const nlohmann::json& j, std::string_view where);

void write_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> recs);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

/// One user id per line.
std::set<std::string> load_trusted_sources(const std::filesystem::path& path);

/// A Real record for every tweet whose author is trusted, in tweet order.
std::vector<AnnotationRecord> annotate_trusted(std::span<const Tweet> tweets,
                                               const std::set<std::string>& trusted_user_ids);

inline constexpr double kDefaultCosineThreshold = 0.85;

struct NearestStatement {
    std::optional<std::size_t> statement;  // index into the statement list; none if list empty
    double similarity = 0.0;
};

/// Argmax cosine statement per tweet; ties go to the smaller statement id.
std::vector<NearestStatement> nearest_statements(std::span<const Tweet> tweets,
                                                 std::span<const SupportingStatement> stmts,
                                                 const TextEmbedder& embedder,
                                                 StatementField field = StatementField::Title);

/// Statements must carry binary verdicts. Tweets whose id is in `skip_tweet_ids`
/// (trusted-source records) are not considered.
std::vector<AnnotationRecord> annotate_by_similarity(
    std::span<const Tweet> tweets, std::span<const SupportingStatement> stmts,
    const TextEmbedder& embedder, double threshold = kDefaultCosineThreshold,
    const std::set<std::string>& skip_tweet_ids = {},
    StatementField field = StatementField::Title);

/// Trusted records first, then cosine matches, each in tweet order.
std::vector<AnnotationRecord> annotate(std::span<const Tweet> tweets,
                                       std::span<const SupportingStatement> stmts,
                                       const TextEmbedder& embedder,
                                       const std::set<std::string>& trusted_user_ids,
                                       double threshold = kDefaultCosineThreshold,
                                       StatementField field = StatementField::Title);

struct GoldTweet {
    Tweet tweet;
    Label gold;
};

/// Tweets file whose records also carry a "label" field ("fake"/"real").
std::vector<GoldTweet> load_gold_tweets(const std::filesystem::path& path);

struct CalibrationRow {
    double threshold = 0.0;
    std::size_t annotated_count = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    bool empty = false;  // accuracy undefined, reported as 0
};

/// Thresholds must be ascending (ValidationError otherwise).
std::vector<CalibrationRow> calibrate_threshold(std::span<const GoldTweet> labeled,
                                                std::span<const SupportingStatement> stmts,
                                                const TextEmbedder& embedder,
                                                std::span<const double> thresholds,
                                                StatementField field = StatementField::Title);

}  // namespace misinfo
