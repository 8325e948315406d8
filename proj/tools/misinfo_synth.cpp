// Writes the bundled synthetic corpus: tweets, fact-check statements, trusted
// sources, gold labels, two bot-score snapshots, account status and a config.
#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "misinfo/jsonl.hpp"
#include "misinfo/rng.hpp"

using json = nlohmann::json;
namespace io = misinfo::io;

namespace {

constexpr int kStatements = 40;
constexpr int kTweets = 300;
constexpr int kGoldTweets = 60;
constexpr int kUsers = 80;
constexpr int kTrustedUsers = 4;
constexpr int kTopicWords = 6;

struct Statement {
    std::string id;
    std::string source;
    std::vector<std::string> topic;
    std::string verdict_raw;
    int truth = -1;  // 1 fake, 0 real, -1 discarded
};

class Words {
public:
    explicit Words(misinfo::Rng& rng) : rng_(rng) {}

    std::string fresh() {
        static const char* syll[] = {"ka", "lo", "mi", "ren", "tu", "sa", "vor", "pe", "qui", "dan",
                                     "zel", "bo", "fi", "gra", "hu", "ji", "nox", "ra", "sim", "te",
                                     "ul", "ve", "wy", "xo", "yar", "cor", "del", "mun", "pol", "tri"};
        while (true) {
            const auto parts = 2 + misinfo::uniform_index(rng_, 2);
            std::string w;
            for (std::size_t i = 0; i < parts; ++i) w += syll[misinfo::uniform_index(rng_, std::size(syll))];
            if (used_.insert(w).second) return w;
        }
    }

private:
    misinfo::Rng& rng_;
    std::set<std::string> used_;
};

template <typename T>
const T& pick(misinfo::Rng& rng, const std::vector<T>& v) {
    return v[misinfo::uniform_index(rng, v.size())];
}

bool chance(misinfo::Rng& rng, double p) { return misinfo::uniform_real(rng) < p; }

std::string join(const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) {
        if (!s.empty()) s += ' ';
        s += x;
    }
    return s;
}

std::string pad(int n, int width) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*d", width, n);
    return buf;
}

std::string words_from(misinfo::Rng& rng, const std::vector<std::string>& pool, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng, pool));
    return join(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"misinfo-synth: write the synthetic fixture corpus"};
    std::string out_dir = "data/synthetic";
    std::uint64_t seed = 20211;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    misinfo::Rng rng(seed);
    Words words(rng);
    std::vector<std::string> filler;
    for (int i = 0; i < 300; ++i) filler.push_back(words.fresh());
    // Tweets pad with a small shared vocabulary so the padding carries little idf.
    std::vector<std::string> chatter;
    for (int i = 0; i < 12; ++i) chatter.push_back(words.fresh());
    const std::vector<std::string> common{"claim", "says", "report", "viral", "post", "news"};

    // Statements: verdict strings cycle through the default groups plus one
    // unmapped rating.
    const std::vector<std::string> fake_raw{"Pants Fire", "False", "Mostly False", "pants-fire",
                                            "misattributed", "Not True", "FALSE", "Full Flop"};
    const std::vector<std::string> real_raw{"True", "Mostly True", "Correct Attribution", "TRUE"};
    const std::vector<std::string> discard_raw{"Unproven", "Satire", "Legend", "Research In Progress"};
    const std::vector<std::string> sources{"politifact", "snopes", "truthorfiction"};

    std::vector<Statement> stmts;
    std::vector<json> stmt_rows;
    for (int i = 0; i < kStatements; ++i) {
        Statement s;
        s.id = "s" + pad(i + 1, 3);
        s.source = sources[static_cast<std::size_t>(i) % sources.size()];
        for (int k = 0; k < kTopicWords; ++k) s.topic.push_back(words.fresh());
        if (i % 10 == 9) {
            s.verdict_raw = i == 39 ? "Mixture" : discard_raw[static_cast<std::size_t>(i / 10) % discard_raw.size()];
        } else if (i % 2 == 0) {
            s.verdict_raw = fake_raw[static_cast<std::size_t>(i / 2) % fake_raw.size()];
            s.truth = 1;
        } else {
            s.verdict_raw = real_raw[static_cast<std::size_t>(i / 2) % real_raw.size()];
            s.truth = 0;
        }
        std::vector<std::string> title = s.topic;
        title.insert(title.begin() + 2, pick(rng, common));
        const std::size_t body_words = i % 7 == 3 ? 380 + misinfo::uniform_index(rng, 120)
                                                  : 40 + misinfo::uniform_index(rng, 160);
        std::vector<std::string> body;
        for (std::size_t w = 0; w < body_words; ++w) {
            body.push_back(chance(rng, 0.15) ? pick(rng, s.topic) : pick(rng, filler));
        }
        std::vector<std::string> claim{s.topic[0], s.topic[1], pick(rng, common), s.topic[3]};
        stmt_rows.push_back({{"id", s.id},
                             {"source", s.source},
                             {"title", join(title)},
                             {"claim", join(claim) + " " + words_from(rng, filler, 4)},
                             {"body", join(body)},
                             {"verdict_raw", s.verdict_raw}});
        stmts.push_back(std::move(s));
    }

    std::vector<const Statement*> fake_stmts, real_stmts, binary_stmts;
    for (const auto& s : stmts) {
        if (s.truth == 1) fake_stmts.push_back(&s);
        if (s.truth == 0) real_stmts.push_back(&s);
        if (s.truth >= 0) binary_stmts.push_back(&s);
    }

    // Users: the first few are trusted outlets, the last ten behave like bots.
    struct User {
        std::string id;
        bool verified;
        std::int64_t followers, friends, favourites, statuses;
        bool bot;
    };
    std::vector<User> users;
    for (int u = 0; u < kUsers; ++u) {
        const bool trusted = u < kTrustedUsers;
        const bool bot = u >= kUsers - 10;
        User x;
        x.id = "u" + pad(u + 1, 3);
        x.verified = trusted || chance(rng, 0.1);
        x.followers = trusted ? 500000 + static_cast<std::int64_t>(misinfo::uniform_index(rng, 500000))
                              : static_cast<std::int64_t>(misinfo::uniform_index(rng, bot ? 300 : 5000));
        x.friends = static_cast<std::int64_t>(misinfo::uniform_index(rng, bot ? 4000 : 1500));
        x.favourites = static_cast<std::int64_t>(misinfo::uniform_index(rng, 20000));
        x.statuses = static_cast<std::int64_t>(misinfo::uniform_index(rng, bot ? 90000 : 15000)) + 1;
        x.bot = bot;
        users.push_back(x);
    }

    auto make_tweet = [&](const std::string& id, const User& user, const Statement* s,
                          std::size_t hour) {
        std::vector<std::string> text;
        const bool fake = s && s->truth == 1;
        if (s) {
            std::vector<std::string> topic = s->topic;
            misinfo::shuffle(std::span<std::string>(topic), rng);
            const auto keep = chance(rng, 0.6) ? kTopicWords : 2 + misinfo::uniform_index(rng, kTopicWords - 2);
            text.assign(topic.begin(), topic.begin() + static_cast<std::ptrdiff_t>(keep));
        }
        const auto n_filler = s ? misinfo::uniform_index(rng, 3) : 3 + misinfo::uniform_index(rng, 7);
        for (std::size_t i = 0; i < n_filler; ++i) text.push_back(pick(rng, chatter));
        misinfo::shuffle(std::span<std::string>(text), rng);
        int mentions = 0, hashtags = 0, urls = 0;
        if (chance(rng, 0.15)) {
            text.insert(text.begin(), "@" + pick(rng, users).id);
            ++mentions;
        }
        if (chance(rng, fake ? 0.6 : 0.2)) {
            text.push_back("#" + pick(rng, filler));
            ++hashtags;
        }
        if (chance(rng, fake ? 0.2 : 0.6)) {
            text.push_back("https://t.co/" + words.fresh());
            ++urls;
        }
        std::string body = join(text);
        if (fake && chance(rng, 0.5)) body += "!!!";
        if (chance(rng, 0.05)) body += " \xE2\x80\x94 \xC3\xA9t\xC3\xA9";  // non-ASCII punctuation and letters
        json t{{"id", id},
               {"text", body},
               {"created_at", "2020-0" + std::to_string(3 + hour / 720) + "-" +
                                  pad(static_cast<int>(1 + (hour / 24) % 28), 2) + "T" +
                                  pad(static_cast<int>(hour % 24), 2) + ":15:00Z"},
               {"lang", "en"},
               {"country", chance(rng, 0.8) ? "US" : "GB"},
               {"user",
                {{"id", user.id},
                 {"verified", user.verified},
                 {"followers_count", user.followers},
                 {"friends_count", user.friends},
                 {"favourites_count", user.favourites},
                 {"statuses_count", user.statuses}}},
               {"favourite_count", misinfo::uniform_index(rng, fake ? 400 : 100)},
               {"retweet_count", misinfo::uniform_index(rng, fake ? 300 : 60)},
               {"is_reply", mentions > 0 && chance(rng, 0.5)}};
        // Half the records carry crawled entity counts; the rest leave them to
        // be recomputed from the text.
        if (chance(rng, 0.5)) {
            t["mention_count"] = mentions;
            t["hashtag_count"] = hashtags;
            t["url_count"] = urls;
            t["media_count"] = misinfo::uniform_index(rng, 2);
        }
        return std::make_pair(t, s ? s->truth : -1);
    };

    std::vector<json> tweet_rows;
    for (int i = 0; i < kTweets; ++i) {
        const User* user;
        const Statement* s = nullptr;
        if (i % 20 == 0) {
            user = &users[static_cast<std::size_t>(i / 20) % kTrustedUsers];
            s = pick(rng, real_stmts);
        } else {
            user = &users[kTrustedUsers + misinfo::uniform_index(rng, kUsers - kTrustedUsers)];
            const double roll = misinfo::uniform_real(rng);
            if (roll < 0.1) {
                s = nullptr;  // unrelated chatter
            } else if (roll < 0.18) {
                s = &stmts[9 + 10 * misinfo::uniform_index(rng, 4)];  // about a discarded rating
            } else {
                s = user->bot && chance(rng, 0.7) ? pick(rng, fake_stmts) : pick(rng, binary_stmts);
            }
        }
        tweet_rows.push_back(make_tweet("t" + pad(i + 1, 4), *user, s, static_cast<std::size_t>(i) * 5).first);
    }

    std::vector<json> gold_rows;
    for (int i = 0; i < kGoldTweets; ++i) {
        const User& user = users[kTrustedUsers + misinfo::uniform_index(rng, kUsers - kTrustedUsers)];
        const Statement* s = pick(rng, binary_stmts);
        auto [t, truth] = make_tweet("g" + pad(i + 1, 3), user, s, static_cast<std::size_t>(i) * 7);
        t["label"] = truth == 1 ? "fake" : "real";
        gold_rows.push_back(t);
    }

    // Bot scores: snapshot A for every user, B for most; some B accounts are gone.
    std::vector<json> scores, status;
    for (std::size_t u = 0; u < users.size(); ++u) {
        const auto& user = users[u];
        const double a = user.bot ? 0.5 + 0.5 * misinfo::uniform_real(rng)
                                  : 0.7 * misinfo::uniform_real(rng);
        const double ra = std::round(a * 1000.0) / 1000.0;
        scores.push_back({{"user_id", user.id}, {"bot_score", ra}, {"snapshot_id", "A"}});
        if (u % 25 == 24) continue;  // absent from snapshot B entirely
        if (u % 9 == 8) {
            status.push_back({{"user_id", user.id}, {"status", "deleted_or_suspended"}, {"snapshot_id", "B"}});
            continue;
        }
        const double b = chance(rng, 0.3) ? misinfo::uniform_real(rng) : a;
        const double rb = std::round(b * 1000.0) / 1000.0;
        scores.push_back({{"user_id", user.id}, {"bot_score", rb}, {"snapshot_id", "B"}});
        status.push_back({{"user_id", user.id}, {"status", "active"}, {"snapshot_id", "B"}});
    }

    std::string trusted = "# verified news outlets; their posts are annotated real\n";
    for (int u = 0; u < kTrustedUsers; ++u) trusted += users[static_cast<std::size_t>(u)].id + "\n";

    const json config{{"tweets", "tweets.jsonl"},
                      {"statements", "statements.jsonl"},
                      {"trusted_sources", "trusted_sources.txt"},
                      {"gold_tweets", "gold_tweets.jsonl"},
                      {"bot_scores", "bot_scores.jsonl"},
                      {"account_status", "account_status.jsonl"},
                      {"output_dir", "out"},
                      {"filters", {{"languages", {"en"}}}},
                      {"text_backend", "tfidf"},
                      {"scorer_backend", "bm25"},
                      {"statement_field", "title"},
                      {"cosine_threshold", 0.85},
                      {"calibration_thresholds", {0.5, 0.7, 0.85, 0.9}},
                      {"label_variants", {1, 2, 3, 4}},
                      {"train_dataset", 3},
                      {"bot_threshold", 0.5},
                      {"bot_sweep", {0.5, 0.6, 0.7, 0.8, 0.9}},
                      {"snapshot_a", "A"},
                      {"snapshot_b", "B"},
                      {"model", {{"rf_trees", 100}, {"stack_folds", 5}}},
                      {"seed", 42}};

    const std::filesystem::path dir = out_dir;
    io::write_jsonl(dir / "statements.jsonl", stmt_rows);
    io::write_jsonl(dir / "tweets.jsonl", tweet_rows);
    io::write_jsonl(dir / "gold_tweets.jsonl", gold_rows);
    io::write_jsonl(dir / "bot_scores.jsonl", scores);
    io::write_jsonl(dir / "account_status.jsonl", status);
    io::write_file(dir / "trusted_sources.txt", trusted);
    io::write_file(dir / "config.json", config.dump(2) + "\n");
    std::cout << "wrote " << tweet_rows.size() << " tweets, " << stmt_rows.size()
              << " statements to " << dir.string() << "\n";
    return 0;
}
