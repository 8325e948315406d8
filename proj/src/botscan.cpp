#include "misinfo/botscan.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"

namespace misinfo {

namespace {

void require_ascending(std::span<const double> thresholds) {
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i - 1] < thresholds[i])) {
            throw ValidationError("thresholds must be strictly ascending");
        }
    }
}

double pct(std::size_t num, std::size_t den) {
    return den ? 100.0 * static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

}  // namespace

std::string_view to_string(AccountState s) {
    return s == AccountState::Active ? "active" : "deleted_or_suspended";
}

AccountState parse_account_state(std::string_view s) {
    if (s == "active") return AccountState::Active;
    if (s == "deleted_or_suspended" || s == "deleted" || s == "suspended") {
        return AccountState::DeletedOrSuspended;
    }
    throw ValidationError("unknown account status '" + std::string(s) + "'");
}

std::vector<BotScoreRecord> load_bot_scores(const std::filesystem::path& path) {
    std::vector<BotScoreRecord> out;
    std::set<std::pair<std::string, std::string>> seen;
    const std::string file = path.string();
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = file + ":" + std::to_string(line);
        BotScoreRecord r;
        r.user_id = io::require_string(rec, "user_id", where);
        r.bot_score = io::require_number(rec, "bot_score", where);
        r.snapshot_id = io::require_string(rec, "snapshot_id", where);
        if (!(r.bot_score >= 0.0 && r.bot_score <= 1.0)) {
            throw ValidationError(where + ": bot_score must be in [0,1]");
        }
        if (!seen.emplace(r.user_id, r.snapshot_id).second) {
            throw ValidationError(where + ": duplicate score for user '" + r.user_id +
                                  "' in snapshot '" + r.snapshot_id + "'");
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::vector<AccountStatus> load_account_status(const std::filesystem::path& path) {
    std::vector<AccountStatus> out;
    std::set<std::pair<std::string, std::string>> seen;
    const std::string file = path.string();
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = file + ":" + std::to_string(line);
        AccountStatus s;
        s.user_id = io::require_string(rec, "user_id", where);
        try {
            s.status = parse_account_state(io::require_string(rec, "status", where));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        s.snapshot_id = io::require_string(rec, "snapshot_id", where);
        if (!seen.emplace(s.user_id, s.snapshot_id).second) {
            throw ValidationError(where + ": duplicate status for user '" + s.user_id + "'");
        }
        out.push_back(std::move(s));
    });
    return out;
}

ScoreTable snapshot_scores(std::span<const BotScoreRecord> recs, std::string_view snapshot_id) {
    ScoreTable t;
    for (const auto& r : recs) {
        if (r.snapshot_id == snapshot_id) t.emplace(r.user_id, r.bot_score);
    }
    return t;
}

StatusTable snapshot_status(std::span<const AccountStatus> recs, std::string_view snapshot_id) {
    StatusTable t;
    for (const auto& r : recs) {
        if (r.snapshot_id == snapshot_id) t.emplace(r.user_id, r.status);
    }
    return t;
}

AccountPartition classify_accounts(const ScoreTable& scores, double threshold) {
    AccountPartition p;
    for (const auto& [id, s] : scores) (s >= threshold ? p.bots : p.humans).push_back(id);
    return p;
}

BotReport fake_bot_fraction(std::span<const LabelRecord> labels, std::span<const Tweet> tweets,
                            const ScoreTable& scores, double threshold) {
    std::unordered_map<std::string, const std::string*> author;
    for (const auto& t : tweets) author.emplace(t.tweet_id, &t.user.user_id);
    BotReport r;
    r.threshold = threshold;
    std::set<std::string> bots;
    for (const auto& rec : labels) {
        if (rec.label != Label::Fake) continue;
        const auto it = author.find(rec.tweet_id);
        if (it == author.end()) {
            throw ValidationError("label for unknown tweet '" + rec.tweet_id + "'");
        }
        ++r.fake_tweet_count;
        const auto s = scores.find(*it->second);
        if (s == scores.end()) {
            ++r.unscored_fake_count;
            continue;
        }
        if (s->second >= threshold) {
            ++r.bot_generated_fake_count;
            bots.insert(*it->second);
        }
    }
    r.unique_bot_accounts = bots.size();
    if (r.fake_tweet_count == 0) {
        r.fraction_undefined = true;
    } else {
        r.fraction = static_cast<double>(r.bot_generated_fake_count) /
                     static_cast<double>(r.fake_tweet_count);
    }
    if (r.unscored_fake_count) {
        spdlog::warn("{} fake tweet(s) have authors without a bot score", r.unscored_fake_count);
    }
    return r;
}

std::vector<SweepRow> threshold_sweep(const ScoreTable& scores, std::span<const double> thresholds) {
    require_ascending(thresholds);
    std::vector<SweepRow> rows;
    for (double t : thresholds) {
        std::size_t n = 0;
        for (const auto& [id, s] : scores) n += s >= t;
        rows.push_back({t, n});
    }
    return rows;
}

std::vector<LongitudinalRow> longitudinal_diff(const ScoreTable& a, const ScoreTable& b,
                                               const StatusTable& b_status,
                                               std::span<const double> thresholds) {
    require_ascending(thresholds);
    std::vector<LongitudinalRow> rows;
    std::set<std::string> warned;
    for (double t : thresholds) {
        LongitudinalRow row;
        row.threshold = t;
        for (const auto& [id, score_a] : a) {
            if (score_a < t) continue;
            ++row.bots_a;
            const auto st = b_status.find(id);
            if (st != b_status.end() && st->second == AccountState::DeletedOrSuspended) {
                ++row.deleted;
                continue;
            }
            const auto sb = b.find(id);
            if (sb == b.end()) {
                if (st != b_status.end()) {
                    throw ValidationError("account '" + id +
                                          "' is active in snapshot B but has no B score");
                }
                ++row.deleted;
                ++row.missing;
                if (warned.insert(id).second) {
                    spdlog::warn("account '{}' absent from snapshot B; counted as deleted", id);
                }
                continue;
            }
            (sb->second >= t ? row.still_bot : row.now_human) += 1;
        }
        row.still_bot_pct = pct(row.still_bot, row.bots_a);
        row.now_human_pct = pct(row.now_human, row.bots_a);
        row.deleted_pct = pct(row.deleted, row.bots_a);
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const BotReport& r) {
    return {{"threshold", r.threshold},
            {"fake_tweet_count", r.fake_tweet_count},
            {"bot_generated_fake_count", r.bot_generated_fake_count},
            {"fraction", r.fraction},
            {"fraction_undefined", r.fraction_undefined},
            {"unique_bot_accounts", r.unique_bot_accounts},
            {"unscored_fake_count", r.unscored_fake_count}};
}

nlohmann::json to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) arr.push_back({{"threshold", r.threshold}, {"bot_count", r.bot_count}});
    return arr;
}

nlohmann::json to_json(const std::vector<LongitudinalRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"threshold", r.threshold},
                       {"bots_a", r.bots_a},
                       {"still_bot", r.still_bot},
                       {"now_human", r.now_human},
                       {"deleted", r.deleted},
                       {"missing_in_b", r.missing},
                       {"still_bot_pct", r.still_bot_pct},
                       {"now_human_pct", r.now_human_pct},
                       {"deleted_pct", r.deleted_pct}});
    }
    return arr;
}

}  // namespace misinfo
