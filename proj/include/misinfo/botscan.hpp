#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "misinfo/corpus.hpp"
#include "misinfo/labeler.hpp"

namespace misinfo {

inline constexpr double kDefaultBotThreshold = 0.5;

struct BotScoreRecord {
    std::string user_id;
    double bot_score = 0.0;
    std::string snapshot_id;
};

enum class AccountState { Active, DeletedOrSuspended };

std::string_view to_string(AccountState s);
AccountState parse_account_state(std::string_view s);

struct AccountStatus {
    std::string user_id;
    AccountState status = AccountState::Active;
    std::string snapshot_id;
};

/// JSON Lines {"user_id", "bot_score", "snapshot_id"}; score in [0,1] and
/// (user_id, snapshot_id) unique.
std::vector<BotScoreRecord> load_bot_scores(const std::filesystem::path& path);
/// JSON Lines {"user_id", "status": "active"|"deleted_or_suspended", "snapshot_id"}.
std::vector<AccountStatus> load_account_status(const std::filesystem::path& path);

using ScoreTable = std::map<std::string, double>;
using StatusTable = std::map<std::string, AccountState>;

ScoreTable snapshot_scores(std::span<const BotScoreRecord> recs, std::string_view snapshot_id);
StatusTable snapshot_status(std::span<const AccountStatus> recs, std::string_view snapshot_id);

struct AccountPartition {
    std::vector<std::string> bots;    // ascending id
    std::vector<std::string> humans;  // ascending id
};

/// Bot iff score >= threshold.
AccountPartition classify_accounts(const ScoreTable& scores, double threshold = kDefaultBotThreshold);

struct BotReport {
    double threshold = kDefaultBotThreshold;
    std::size_t fake_tweet_count = 0;
    std::size_t bot_generated_fake_count = 0;
    double fraction = 0.0;
    std::size_t unique_bot_accounts = 0;
    std::size_t unscored_fake_count = 0;  // fake tweets whose author has no score
    bool fraction_undefined = false;
};

/// Fake-labeled tweets authored by bot-classified accounts. Unscored authors count
/// as non-bots and are reported. A label naming a tweet that is not in `tweets`
/// is a ValidationError.
BotReport fake_bot_fraction(std::span<const LabelRecord> labels, std::span<const Tweet> tweets,
                            const ScoreTable& scores, double threshold = kDefaultBotThreshold);

struct SweepRow {
    double threshold = 0.0;
    std::size_t bot_count = 0;
};

/// Thresholds must be ascending.
std::vector<SweepRow> threshold_sweep(const ScoreTable& scores, std::span<const double> thresholds);

struct LongitudinalRow {
    double threshold = 0.0;
    std::size_t bots_a = 0;
    std::size_t still_bot = 0;
    std::size_t now_human = 0;
    std::size_t deleted = 0;
    std::size_t missing = 0;  // counted in `deleted`: no B score and no B status
    double still_bot_pct = 0.0;
    double now_human_pct = 0.0;
    double deleted_pct = 0.0;
};

/// For every bot in A: deleted when B's status says so, otherwise still_bot when the
/// B score clears the threshold, otherwise now_human. An account with neither a B
/// score nor a B status is counted as deleted with a warning; one marked active in
/// B but not scored there is a ValidationError.
std::vector<LongitudinalRow> longitudinal_diff(const ScoreTable& a, const ScoreTable& b,
                                               const StatusTable& b_status,
                                               std::span<const double> thresholds);

nlohmann::json to_json(const BotReport& r);
nlohmann::json to_json(const std::vector<SweepRow>& rows);
nlohmann::json to_json(const std::vector<LongitudinalRow>& rows);

}  // namespace misinfo
