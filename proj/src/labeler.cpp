#include "misinfo/labeler.hpp"

#include <algorithm>
#include <cmath>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"

namespace misinfo {

std::string_view to_string(VotingMethod m) {
    return m == VotingMethod::RegularMajority ? "regular" : "weighted";
}

VotingMethod parse_voting_method(std::string_view s) {
    if (s == "regular") return VotingMethod::RegularMajority;
    if (s == "weighted") return VotingMethod::WeightedMajority;
    throw ValidationError("unknown voting method: " + std::string(s));
}

int labeled_data_index(BodyMode mode, VotingMethod method) {
    return (mode == BodyMode::WithBody ? 3 : 1) + (method == VotingMethod::WeightedMajority ? 1 : 0);
}

Label majority_label(const std::array<Label, kRankedPerTweet>& verdicts) {
    const auto fakes = std::count(verdicts.begin(), verdicts.end(), Label::Fake);
    return fakes >= 2 ? Label::Fake : Label::Real;
}

WeightedVote weighted_vote(const std::array<Label, kRankedPerTweet>& verdicts,
                           const std::array<double, kRankedPerTweet>& cosines,
                           const std::array<double, kRankedPerTweet>& relevances) {
    std::array<double, kRankedPerTweet> w{};
    double sum = 0.0;
    for (std::size_t i = 0; i < kRankedPerTweet; ++i) {
        w[i] = std::max(0.0, cosines[i]);
        sum += w[i];
    }
    WeightedVote v;
    if (sum <= kCosineSumEpsilon) {
        v.fallback = true;
        v.label = majority_label(verdicts);
        return v;
    }
    for (std::size_t i = 0; i < kRankedPerTweet; ++i) {
        const double contribution = (w[i] / sum) * relevances[i];
        (verdicts[i] == Label::Fake ? v.score_fake : v.score_real) += contribution;
    }
    v.label = v.score_fake >= v.score_real ? Label::Fake : Label::Real;
    return v;
}

VotingContext::VotingContext(const TextEmbedder& embedder, std::span<const Tweet> tweets,
                             std::span<const SupportingStatement> stmts, StatementField field)
    : embedder_(embedder), field_(field) {
    for (const auto& t : tweets) tweets_.emplace(t.tweet_id, &t);
    for (const auto& s : stmts) stmts_.emplace(s.statement_id, &s);
}

double VotingContext::cosine(const std::string& tweet_id, const std::string& statement_id) const {
    const auto t = tweets_.find(tweet_id);
    if (t == tweets_.end()) throw ValidationError("unknown tweet '" + tweet_id + "'");
    const auto s = stmts_.find(statement_id);
    if (s == stmts_.end()) throw ValidationError("unknown statement '" + statement_id + "'");
    return cosine_similarity(embedder_.embed(tweet_id, t->second->text),
                             embedder_.embed(statement_id, embedding_text(*s->second, field_)));
}

namespace {

LabelRecord base_record(const TweetResult& tr, VotingMethod method, BodyMode mode) {
    LabelRecord r;
    r.tweet_id = tr.tweet_id;
    r.method = method;
    r.body_mode = mode;
    for (std::size_t i = 0; i < kRankedPerTweet; ++i) {
        const auto& s = tr.top3[i];
        r.evidence[i] = {s.statement_id, s.rank, s.relevance, 0.0, s.verdict};
    }
    return r;
}

std::array<Label, kRankedPerTweet> verdicts_of(const TweetResult& tr) {
    return {tr.top3[0].verdict, tr.top3[1].verdict, tr.top3[2].verdict};
}

}  // namespace

LabelRecord regular_majority(const TweetResult& tr, BodyMode mode) {
    auto r = base_record(tr, VotingMethod::RegularMajority, mode);
    r.label = majority_label(verdicts_of(tr));
    return r;
}

LabelRecord weighted_majority(const TweetResult& tr, const VotingContext& ctx, BodyMode mode) {
    auto r = base_record(tr, VotingMethod::WeightedMajority, mode);
    std::array<double, kRankedPerTweet> cos{};
    std::array<double, kRankedPerTweet> rel{};
    for (std::size_t i = 0; i < kRankedPerTweet; ++i) {
        rel[i] = tr.top3[i].relevance;
        if (!std::isfinite(rel[i]) || rel[i] < 0.0) {
            throw ValidationError("negative or non-finite relevance for (" + tr.tweet_id + ", " +
                                  tr.top3[i].statement_id + ")");
        }
        cos[i] = ctx.cosine(tr.tweet_id, tr.top3[i].statement_id);
        r.evidence[i].cosine_weight = std::max(0.0, cos[i]);
    }
    const auto v = weighted_vote(verdicts_of(tr), cos, rel);
    r.label = v.label;
    r.score_fake = v.score_fake;
    r.score_real = v.score_real;
    r.fallback = v.fallback;
    return r;
}

LabeledData label_corpus(std::span<const TweetResult> results, VotingMethod method,
                         BodyMode mode, const VotingContext* ctx) {
    if (method == VotingMethod::WeightedMajority && !ctx) {
        throw ValidationError("weighted majority voting needs an embedding context");
    }
    LabeledData out;
    out.records.reserve(results.size());
    for (const auto& tr : results) {
        auto r = method == VotingMethod::RegularMajority ? regular_majority(tr, mode)
                                                         : weighted_majority(tr, *ctx, mode);
        ++(r.label == Label::Fake ? out.summary.fake : out.summary.real);
        if (r.fallback) ++out.summary.fallback;
        out.records.push_back(std::move(r));
    }
    return out;
}

nlohmann::json to_json(const LabelRecord& r) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : r.evidence) {
        ev.push_back({{"statement_id", e.statement_id},
                      {"rank", e.rank},
                      {"relevance", e.relevance},
                      {"cosine_weight", e.cosine_weight},
                      {"verdict", to_string(e.verdict)}});
    }
    return {{"tweet_id", r.tweet_id},       {"label", to_string(r.label)},
            {"method", to_string(r.method)}, {"body_mode", to_string(r.body_mode)},
            {"score_fake", r.score_fake},   {"score_real", r.score_real},
            {"evidence", ev},               {"fallback", r.fallback}};
}

LabelRecord label_from_json(const nlohmann::json& j, std::string_view where) {
    LabelRecord r;
    r.tweet_id = io::require_string(j, "tweet_id", where);
    const auto l = parse_label(io::require_string(j, "label", where));
    if (!l) throw ValidationError(std::string(where) + ": bad label");
    r.label = *l;
    r.method = parse_voting_method(io::require_string(j, "method", where));
    r.body_mode = parse_body_mode(io::require_string(j, "body_mode", where));
    r.score_fake = io::require_number(j, "score_fake", where);
    r.score_real = io::require_number(j, "score_real", where);
    r.fallback = io::optional_bool(j, "fallback", false, where);
    const auto ev = j.find("evidence");
    if (ev == j.end() || !ev->is_array() || ev->size() != kRankedPerTweet) {
        throw ValidationError(std::string(where) + ": evidence must hold exactly 3 entries");
    }
    for (std::size_t i = 0; i < kRankedPerTweet; ++i) {
        const auto& e = (*ev)[i];
        auto& out = r.evidence[i];
        out.statement_id = io::require_string(e, "statement_id", where);
        out.rank = static_cast<int>(io::require_count(e, "rank", where));
        out.relevance = io::require_number(e, "relevance", where);
        out.cosine_weight = io::require_number(e, "cosine_weight", where);
        const auto v = parse_label(io::require_string(e, "verdict", where));
        if (!v) throw ValidationError(std::string(where) + ": bad evidence verdict");
        out.verdict = *v;
    }
    return r;
}

void write_labels(const std::filesystem::path& path, std::span<const LabelRecord> recs) {
    std::vector<nlohmann::json> rows;
    rows.reserve(recs.size());
    for (const auto& r : recs) rows.push_back(to_json(r));
    io::write_jsonl(path, rows);
}

std::vector<LabelRecord> load_labels(const std::filesystem::path& path) {
    std::vector<LabelRecord> out;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        out.push_back(label_from_json(rec, path.string() + ":" + std::to_string(line)));
    });
    return out;
}

}  // namespace misinfo
