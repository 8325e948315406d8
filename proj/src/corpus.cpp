#include "misinfo/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <unordered_set>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"
#include "misinfo/unicode.hpp"

namespace misinfo {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const char* first_failing_rule(const Tweet& t, const FilterSpec& f) {
    if (unicode::trim(t.text).empty()) return "empty_text";
    if (!f.languages.empty() && !f.languages.contains(t.lang)) return "lang";
    if (!f.countries.empty() && !f.countries.contains(t.country)) return "country";
    return nullptr;
}

Tweet parse_tweet(const io::json& rec, std::string_view where) {
    Tweet t;
    t.tweet_id = io::require_string(rec, "id", where);
    if (t.tweet_id.empty()) throw ValidationError(std::string(where) + ": empty tweet id");
    t.text = io::require_string(rec, "text", where);
    if (auto ts = io::optional_string(rec, "created_at", where); !ts.empty()) {
        t.created_at = parse_utc_timestamp(ts);
        if (!t.created_at) {
            throw ValidationError(std::string(where) + ": bad created_at timestamp '" + ts + "'");
        }
    }
    t.lang = io::optional_string(rec, "lang", where);
    t.country = io::optional_string(rec, "country", where);

    const auto u = rec.find("user");
    if (u == rec.end() || !u->is_object()) {
        throw ValidationError(std::string(where) + ": field 'user' is missing");
    }
    const std::string uwhere = std::string(where) + " user";
    t.user.user_id = io::require_string(*u, "id", uwhere);
    if (t.user.user_id.empty()) throw ValidationError(uwhere + ": empty user id");
    t.user.is_verified = io::optional_bool(*u, "verified", false, uwhere);
    t.user.followers_count = io::optional_count(*u, "followers_count", uwhere).value_or(0);
    t.user.friends_count = io::optional_count(*u, "friends_count", uwhere).value_or(0);
    t.user.favourites_count = io::optional_count(*u, "favourites_count", uwhere).value_or(0);
    t.user.statuses_count = io::optional_count(*u, "statuses_count", uwhere).value_or(0);

    t.mention_count = io::optional_count(rec, "mention_count", where);
    t.hashtag_count = io::optional_count(rec, "hashtag_count", where);
    t.url_count = io::optional_count(rec, "url_count", where);
    t.media_count = io::optional_count(rec, "media_count", where);
    t.favourite_count = io::optional_count(rec, "favourite_count", where).value_or(0);
    t.retweet_count = io::optional_count(rec, "retweet_count", where).value_or(0);
    t.is_reply = io::optional_bool(rec, "is_reply", false, where);
    return t;
}

}  // namespace

std::string_view to_string(StatementSource s) {
    switch (s) {
        case StatementSource::Politifact: return "Politifact";
        case StatementSource::Snopes: return "Snopes";
        case StatementSource::TruthOrFiction: return "TruthOrFiction";
        case StatementSource::Other: break;
    }
    return "Other";
}

StatementSource parse_source(std::string_view s) {
    const auto l = lower_ascii(s);
    if (l == "politifact") return StatementSource::Politifact;
    if (l == "snopes") return StatementSource::Snopes;
    if (l == "truthorfiction" || l == "truth-or-fiction" || l == "truth_or_fiction")
        return StatementSource::TruthOrFiction;
    return StatementSource::Other;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Fake: return "fake";
        case Verdict::Real: return "real";
        case Verdict::Discard: break;
    }
    return "discard";
}

std::optional<Label> verdict_label(Verdict v) {
    if (v == Verdict::Fake) return Label::Fake;
    if (v == Verdict::Real) return Label::Real;
    return std::nullopt;
}

std::vector<Tweet> apply_filters(const std::vector<Tweet>& tweets, const FilterSpec& filters,
                                 CorpusManifest* manifest) {
    std::vector<Tweet> kept;
    kept.reserve(tweets.size());
    for (const auto& t : tweets) {
        if (const char* rule = first_failing_rule(t, filters)) {
            if (manifest) ++manifest->dropped[rule];
            continue;
        }
        kept.push_back(t);
    }
    return kept;
}

TweetCorpus load_tweets(const std::filesystem::path& path, const FilterSpec& filters) {
    std::vector<Tweet> all;
    std::unordered_set<std::string> seen;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        auto t = parse_tweet(rec, where);
        if (!seen.insert(t.tweet_id).second) {
            throw ValidationError(where + ": duplicate tweet id '" + t.tweet_id + "'");
        }
        all.push_back(std::move(t));
    });

    TweetCorpus out;
    out.manifest.input_count = all.size();
    out.tweets = apply_filters(all, filters, &out.manifest);
    out.manifest.tweet_count = out.tweets.size();
    return out;
}

std::size_t word_count(std::string_view text) { return unicode::split_ws(text).size(); }

std::string truncate_words(std::string_view text, std::size_t max_words) {
    const auto words = unicode::split_ws(text);
    if (words.empty() || max_words == 0) return {};
    if (words.size() <= max_words) return std::string(unicode::trim(text));
    const auto& first = words.front();
    const auto& last = words[max_words - 1];
    const auto begin = static_cast<std::size_t>(first.data() - text.data());
    const auto end = static_cast<std::size_t>(last.data() - text.data()) + last.size();
    return std::string(text.substr(begin, end - begin));
}

std::vector<SupportingStatement> load_statements(const std::filesystem::path& path,
                                                 BodyMode mode) {
    std::vector<SupportingStatement> out;
    std::unordered_set<std::string> seen;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        SupportingStatement s;
        s.statement_id = io::require_string(rec, "id", where);
        if (s.statement_id.empty()) throw ValidationError(where + ": empty statement id");
        const std::string swhere = where + " statement '" + s.statement_id + "'";
        s.source = parse_source(io::optional_string(rec, "source", swhere));
        s.title = io::optional_string(rec, "title", swhere);
        if (unicode::trim(s.title).empty()) throw ValidationError(swhere + ": missing title");
        s.verdict_raw = io::optional_string(rec, "verdict_raw", swhere);
        if (unicode::trim(s.verdict_raw).empty())
            throw ValidationError(swhere + ": missing verdict_raw");
        if (mode == BodyMode::WithBody) {
            s.claim = io::optional_string(rec, "claim", swhere);
            s.body = truncate_words(io::optional_string(rec, "body", swhere), kMaxBodyWords);
        }
        if (!seen.insert(s.statement_id).second) {
            throw ValidationError(where + ": duplicate statement id '" + s.statement_id + "'");
        }
        out.push_back(std::move(s));
    });
    return out;
}

std::string statement_text(const SupportingStatement& s) {
    std::string out;
    for (const std::string* seg : {&s.title, &s.claim, &s.body}) {
        auto piece = unicode::squeeze_ws(*seg);
        if (piece.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += piece;
    }
    return out;
}

std::optional<std::chrono::sys_seconds> parse_utc_timestamp(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (s.size() < 19) return std::nullopt;
    const std::string head(s.substr(0, 19));
    char t_sep = 0;
    if (std::sscanf(head.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &t_sep, &h, &mi,
                    &sec) != 7)
        return std::nullopt;
    if (head[4] != '-' || head[7] != '-' || head[13] != ':' || head[16] != ':') return std::nullopt;
    if (t_sep != 'T' && t_sep != ' ') return std::nullopt;
    auto rest = s.substr(19);
    if (!rest.empty() && rest.front() == '.') {
        std::size_t i = 1;
        while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
        if (i == 1) return std::nullopt;
        rest = rest.substr(i);
    }
    if (rest != "Z" && rest != "+00:00" && rest != "") return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string format_utc_timestamp(std::chrono::sys_seconds t) {
    using namespace std::chrono;
    const auto days = floor<std::chrono::days>(t);
    const year_month_day ymd{days};
    const hh_mm_ss hms{t - days};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::map<std::string, std::size_t> count_by_source(const std::vector<SupportingStatement>& s) {
    std::map<std::string, std::size_t> out;
    for (const auto& st : s) ++out[std::string(to_string(st.source))];
    return out;
}

}  // namespace misinfo
