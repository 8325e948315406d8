#include "misinfo/annotator.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"

namespace misinfo {

std::string_view to_string(StatementField f) {
    return f == StatementField::Title ? "title" : "full";
}

StatementField parse_statement_field(std::string_view s) {
    if (s == "title") return StatementField::Title;
    if (s == "full") return StatementField::FullText;
    throw ValidationError("unknown statement field: " + std::string(s));
}

std::string embedding_text(const SupportingStatement& s, StatementField field) {
    return field == StatementField::Title ? s.title : statement_text(s);
}

nlohmann::json to_json(const AnnotationRecord& r) {
    nlohmann::json j{{"tweet_id", r.tweet_id},
                     {"label", to_string(r.label)},
                     {"method", r.method == AnnotationMethod::TrustedSource ? "trusted_source"
                                                                            : "cosine_match"}};
    j["matched_statement_id"] = r.matched_statement_id ? nlohmann::json(*r.matched_statement_id)
                                                       : nlohmann::json(nullptr);
    j["similarity"] = r.similarity ? nlohmann::json(*r.similarity) : nlohmann::json(nullptr);
    return j;
}

AnnotationRecord annotation_from_json(const nlohmann::json& j, std::string_view where) {
    AnnotationRecord r;
    r.tweet_id = io::require_string(j, "tweet_id", where);
    const auto label = parse_label(io::require_string(j, "label", where));
    if (!label) throw ValidationError(std::string(where) + ": bad label");
    r.label = *label;
    const auto method = io::require_string(j, "method", where);
    if (method == "trusted_source") {
        r.method = AnnotationMethod::TrustedSource;
    } else if (method == "cosine_match") {
        r.method = AnnotationMethod::CosineMatch;
    } else {
        throw ValidationError(std::string(where) + ": bad method '" + method + "'");
    }
    if (auto s = io::optional_string(j, "matched_statement_id", where); !s.empty()) {
        r.matched_statement_id = s;
    }
    if (j.contains("similarity") && !j["similarity"].is_null()) {
        r.similarity = io::require_number(j, "similarity", where);
    }
    return r;
}

void write_annotations(const std::filesystem::path& path, std::span<const AnnotationRecord> recs) {
    std::vector<nlohmann::json> rows;
    rows.reserve(recs.size());
    for (const auto& r : recs) rows.push_back(to_json(r));
    io::write_jsonl(path, rows);
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    std::vector<AnnotationRecord> out;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        out.push_back(annotation_from_json(rec, path.string() + ":" + std::to_string(line)));
    });
    return out;
}

std::set<std::string> load_trusted_sources(const std::filesystem::path& path) {
    const auto lines = io::read_lines(path);
    return {lines.begin(), lines.end()};
}

std::vector<AnnotationRecord> annotate_trusted(std::span<const Tweet> tweets,
                                               const std::set<std::string>& trusted_user_ids) {
    std::vector<AnnotationRecord> out;
    for (const auto& t : tweets) {
        if (trusted_user_ids.contains(t.user.user_id)) {
            out.push_back({t.tweet_id, Label::Real, AnnotationMethod::TrustedSource, {}, {}});
        }
    }
    return out;
}

std::vector<NearestStatement> nearest_statements(std::span<const Tweet> tweets,
                                                 std::span<const SupportingStatement> stmts,
                                                 const TextEmbedder& embedder,
                                                 StatementField field) {
    std::vector<std::size_t> order(stmts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return stmts[a].statement_id < stmts[b].statement_id;
    });
    std::vector<Embedding> stmt_vecs;
    stmt_vecs.reserve(stmts.size());
    for (std::size_t i : order) {
        stmt_vecs.push_back(embedder.embed(stmts[i].statement_id, embedding_text(stmts[i], field)));
    }

    std::vector<NearestStatement> out(tweets.size());
    for (std::size_t t = 0; t < tweets.size(); ++t) {
        const auto tv = embedder.embed(tweets[t].tweet_id, tweets[t].text);
        NearestStatement best;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const double sim = cosine_similarity(tv, stmt_vecs[k]);
            if (!best.statement || sim > best.similarity) {
                best.statement = order[k];
                best.similarity = sim;
            }
        }
        out[t] = best;
    }
    return out;
}

std::vector<AnnotationRecord> annotate_by_similarity(std::span<const Tweet> tweets,
                                                     std::span<const SupportingStatement> stmts,
                                                     const TextEmbedder& embedder,
                                                     double threshold,
                                                     const std::set<std::string>& skip_tweet_ids,
                                                     StatementField field) {
    for (const auto& s : stmts) {
        if (!verdict_label(s.verdict)) {
            throw ValidationError("statement '" + s.statement_id +
                                  "' has no binary verdict; group verdicts first");
        }
    }
    std::vector<Tweet> pending;
    for (const auto& t : tweets) {
        if (!skip_tweet_ids.contains(t.tweet_id)) pending.push_back(t);
    }
    const auto nearest = nearest_statements(pending, stmts, embedder, field);
    std::vector<AnnotationRecord> out;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& n = nearest[i];
        if (!n.statement || n.similarity < threshold) continue;
        const auto& s = stmts[*n.statement];
        out.push_back({pending[i].tweet_id, *verdict_label(s.verdict),
                       AnnotationMethod::CosineMatch, s.statement_id, n.similarity});
    }
    return out;
}

std::vector<AnnotationRecord> annotate(std::span<const Tweet> tweets,
                                       std::span<const SupportingStatement> stmts,
                                       const TextEmbedder& embedder,
                                       const std::set<std::string>& trusted_user_ids,
                                       double threshold, StatementField field) {
    auto out = annotate_trusted(tweets, trusted_user_ids);
    std::set<std::string> skip;
    for (const auto& r : out) skip.insert(r.tweet_id);
    auto matched = annotate_by_similarity(tweets, stmts, embedder, threshold, skip, field);
    out.insert(out.end(), std::make_move_iterator(matched.begin()),
               std::make_move_iterator(matched.end()));
    return out;
}

std::vector<GoldTweet> load_gold_tweets(const std::filesystem::path& path) {
    // Reuse the tweet parser for the shared fields, then attach labels by id.
    const auto corpus = load_tweets(path);
    std::map<std::string, Label> labels;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        const auto l = parse_label(io::require_string(rec, "label", where));
        if (!l) throw ValidationError(where + ": label must be 'fake' or 'real'");
        labels[io::require_string(rec, "id", where)] = *l;
    });
    std::vector<GoldTweet> out;
    out.reserve(corpus.tweets.size());
    for (const auto& t : corpus.tweets) out.push_back({t, labels.at(t.tweet_id)});
    return out;
}

std::vector<CalibrationRow> calibrate_threshold(std::span<const GoldTweet> labeled,
                                                std::span<const SupportingStatement> stmts,
                                                const TextEmbedder& embedder,
                                                std::span<const double> thresholds,
                                                StatementField field) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw ValidationError("calibration thresholds must be ascending");
    }
    std::vector<Tweet> tweets;
    tweets.reserve(labeled.size());
    for (const auto& g : labeled) tweets.push_back(g.tweet);

    for (const auto& s : stmts) {
        if (!verdict_label(s.verdict)) {
            throw ValidationError("statement '" + s.statement_id + "' has no binary verdict");
        }
    }
    // Annotation at any threshold is the argmax match filtered by similarity, so the
    // nearest statement is computed once for the whole sweep.
    const auto nearest = nearest_statements(tweets, stmts, embedder, field);

    std::vector<CalibrationRow> rows;
    for (double th : thresholds) {
        CalibrationRow row;
        row.threshold = th;
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            const auto& n = nearest[i];
            if (!n.statement || n.similarity < th) continue;
            ++row.annotated_count;
            if (*verdict_label(stmts[*n.statement].verdict) == labeled[i].gold) ++row.correct;
        }
        row.empty = row.annotated_count == 0;
        row.accuracy = row.empty ? 0.0
                                 : static_cast<double>(row.correct) /
                                       static_cast<double>(row.annotated_count);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace misinfo
