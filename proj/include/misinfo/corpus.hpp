#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "misinfo/types.hpp"

namespace misinfo {

struct UserProfile {
    std::string user_id;
    bool is_verified = false;
    std::int64_t followers_count = 0;
    std::int64_t friends_count = 0;
    std::int64_t favourites_count = 0;
    std::int64_t statuses_count = 0;
};

/// One post. Entity counts are optional: crawled records carry them, synthetic
/// ones may not, in which case features are recomputed from the text.
struct Tweet {
    std::string tweet_id;
    std::string text;
    std::optional<std::chrono::sys_seconds> created_at;
    std::string lang;
    std::string country;
    UserProfile user;
    std::optional<std::int64_t> mention_count;
    std::optional<std::int64_t> hashtag_count;
    std::optional<std::int64_t> url_count;
    std::optional<std::int64_t> media_count;
    std::int64_t favourite_count = 0;
    std::int64_t retweet_count = 0;
    bool is_reply = false;
};

enum class StatementSource { Politifact, Snopes, TruthOrFiction, Other };

std::string_view to_string(StatementSource s);
StatementSource parse_source(std::string_view s);

enum class Verdict { Fake, Real, Discard };

std::string_view to_string(Verdict v);

/// Binary verdicts only; Discard has no label.
std::optional<Label> verdict_label(Verdict v);

struct SupportingStatement {
    std::string statement_id;
    StatementSource source = StatementSource::Other;
    std::string title;
    std::string claim;
    std::string body;
    std::string verdict_raw;
    Verdict verdict = Verdict::Discard;
};

/// Empty allowlists accept everything. Empty text is always dropped.
struct FilterSpec {
    std::set<std::string> languages;
    std::set<std::string> countries;
};

struct CorpusManifest {
    std::size_t input_count = 0;
    std::size_t tweet_count = 0;
    std::map<std::string, std::size_t> dropped;  // rule -> count
    std::map<std::string, std::size_t> statement_counts_by_source;
};

struct TweetCorpus {
    std::vector<Tweet> tweets;
    CorpusManifest manifest;
};

inline constexpr std::size_t kMaxBodyWords = 350;

/// Reads a JSON Lines tweets file, applies `filters`, preserves input order.
/// Throws ValidationError on malformed lines (naming the line) or duplicate ids.
TweetCorpus load_tweets(const std::filesystem::path& path, const FilterSpec& filters = {});

/// Applies the same filters to an in-memory corpus; returns the retained tweets
/// and adds per-rule drop counts to `manifest` when given.
std::vector<Tweet> apply_filters(const std::vector<Tweet>& tweets, const FilterSpec& filters,
                                 CorpusManifest* manifest = nullptr);

std::vector<SupportingStatement> load_statements(const std::filesystem::path& path,
                                                 BodyMode mode);

/// First `max_words` whitespace-delimited words of `text`, original spacing kept
/// between them.
std::string truncate_words(std::string_view text, std::size_t max_words);
std::size_t word_count(std::string_view text);

/// Title, claim and body joined by single spaces, empty segments skipped, internal
/// whitespace runs collapsed.
std::string statement_text(const SupportingStatement& s);

/// Parses "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)".
std::optional<std::chrono::sys_seconds> parse_utc_timestamp(std::string_view s);
std::string format_utc_timestamp(std::chrono::sys_seconds t);

std::map<std::string, std::size_t> count_by_source(const std::vector<SupportingStatement>& s);

}  // namespace misinfo
