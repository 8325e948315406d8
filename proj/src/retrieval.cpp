#include "misinfo/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "misinfo/error.hpp"
#include "misinfo/jsonl.hpp"

namespace misinfo {

namespace {

std::vector<std::string> distinct_terms(const TokenStream& query) {
    std::vector<std::string> terms(query.begin(), query.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

double term_weight(double idf, double tf, double doc_len, const Bm25Index& idx) {
    const auto& p = idx.params();
    const double norm = 1.0 - p.b + p.b * doc_len / idx.average_doc_length();
    return idf * tf * (p.k1 + 1.0) / (tf + p.k1 * norm);
}

}  // namespace

std::span<const Posting> Bm25Index::postings(const std::string& term) const {
    const auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

double Bm25Index::idf(std::size_t df) const {
    const double n = static_cast<double>(document_count());
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

Bm25Index build_index(std::span<const SupportingStatement> stmts, Bm25Params params,
                      const TokenizerOptions& opts) {
    if (!(params.k1 > 0.0)) throw ValidationError("BM25 k1 must be positive");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw ValidationError("BM25 b must lie in [0, 1]");
    if (stmts.empty()) throw ValidationError("cannot build a BM25 index with no statements");

    Bm25Index idx;
    idx.params_ = params;
    idx.tokenizer_ = opts;
    std::size_t total = 0;
    for (std::uint32_t d = 0; d < stmts.size(); ++d) {
        auto toks = tokenize(statement_text(stmts[d]), opts);
        idx.doc_lengths_.push_back(toks.size());
        idx.ids_.push_back(stmts[d].statement_id);
        idx.verdicts_.push_back(verdict_label(stmts[d].verdict));
        total += toks.size();
        std::sort(toks.begin(), toks.end());
        for (std::size_t i = 0; i < toks.size();) {
            std::size_t j = i;
            while (j < toks.size() && toks[j] == toks[i]) ++j;
            idx.postings_[toks[i]].push_back({d, static_cast<std::uint32_t>(j - i)});
            i = j;
        }
    }
    if (total == 0) throw ValidationError("every statement tokenizes to nothing; cannot build BM25 index");
    idx.avgdl_ = static_cast<double>(total) / static_cast<double>(stmts.size());
    return idx;
}

double bm25_score(const TokenStream& query, std::size_t doc_index, const Bm25Index& idx) {
    if (doc_index >= idx.document_count()) {
        throw ValidationError("bm25_score: document index out of range");
    }
    double score = 0.0;
    const double len = static_cast<double>(idx.doc_lengths()[doc_index]);
    for (const auto& term : distinct_terms(query)) {
        const auto plist = idx.postings(term);
        const auto it = std::lower_bound(plist.begin(), plist.end(), doc_index,
                                         [](const Posting& p, std::size_t d) { return p.doc < d; });
        if (it == plist.end() || it->doc != doc_index) continue;
        score += term_weight(idx.idf(plist.size()), it->tf, len, idx);
    }
    return score;
}

std::vector<double> bm25_score_all(const TokenStream& query, const Bm25Index& idx) {
    std::vector<double> scores(idx.document_count(), 0.0);
    for (const auto& term : distinct_terms(query)) {
        const auto plist = idx.postings(term);
        if (plist.empty()) continue;
        const double idf = idx.idf(plist.size());
        for (const auto& p : plist) {
            scores[p.doc] +=
                term_weight(idf, p.tf, static_cast<double>(idx.doc_lengths()[p.doc]), idx);
        }
    }
    return scores;
}

std::vector<Candidate> top_n_candidates(std::string_view tweet_text, const Bm25Index& idx,
                                        std::size_t n) {
    const auto scores = bm25_score_all(tokenize(tweet_text, idx.tokenizer()), idx);
    std::vector<Candidate> positive;
    for (std::size_t d = 0; d < scores.size(); ++d) {
        if (scores[d] > 0.0) positive.push_back({d, scores[d]});
    }
    auto by_score = [&](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return idx.statement_id(a.doc_index) < idx.statement_id(b.doc_index);
    };
    std::sort(positive.begin(), positive.end(), by_score);
    if (positive.size() > n) positive.resize(n);

    const std::size_t want = std::min({kRankedPerTweet, n, idx.document_count()});
    if (positive.size() < want) {
        std::vector<std::size_t> order(idx.document_count());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return idx.statement_id(a) < idx.statement_id(b);
        });
        std::set<std::size_t> used;
        for (const auto& c : positive) used.insert(c.doc_index);
        for (std::size_t d : order) {
            if (positive.size() >= want) break;
            if (!used.contains(d)) positive.push_back({d, 0.0});
        }
    }
    return positive;
}

void ExternalScores::insert(const std::string& tweet_id, const std::string& statement_id,
                            double score) {
    if (!std::isfinite(score) || score < 0.0) {
        throw ValidationError("relevance score for (" + tweet_id + ", " + statement_id +
                              ") must be finite and non-negative");
    }
    if (!scores_.emplace(std::make_pair(tweet_id, statement_id), score).second) {
        throw ValidationError("duplicate relevance pair (" + tweet_id + ", " + statement_id + ")");
    }
    ++tweets_[tweet_id];
}

std::optional<double> ExternalScores::find(const std::string& tweet_id,
                                           const std::string& statement_id) const {
    const auto it = scores_.find({tweet_id, statement_id});
    if (it == scores_.end()) return std::nullopt;
    return it->second;
}

ExternalScores load_relevance_scores(const std::filesystem::path& path) {
    ExternalScores out;
    io::for_each_record(path, [&](const io::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        const auto tid = io::require_string(rec, "tweet_id", where);
        const auto sid = io::require_string(rec, "statement_id", where);
        const double score = io::require_number(rec, "score", where);
        try {
            out.insert(tid, sid, score);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    });
    return out;
}

TweetResult rank_top3(const std::string& tweet_id, std::span<const Candidate> candidates,
                      const Bm25Index& idx, const RelevanceScorer& scorer) {
    if (candidates.size() < kRankedPerTweet) {
        throw ValidationError("tweet '" + tweet_id + "' has only " +
                              std::to_string(candidates.size()) + " candidate statements");
    }
    std::vector<Candidate> rescored(candidates.begin(), candidates.end());
    if (scorer.external) {
        for (auto& c : rescored) {
            const auto& sid = idx.statement_id(c.doc_index);
            const auto s = scorer.external->find(tweet_id, sid);
            if (!s) {
                throw ValidationError("relevance score missing for (" + tweet_id + ", " + sid + ")");
            }
            c.score = *s;
        }
    }
    std::stable_sort(rescored.begin(), rescored.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return idx.statement_id(a.doc_index) < idx.statement_id(b.doc_index);
    });

    TweetResult tr;
    tr.tweet_id = tweet_id;
    for (std::size_t r = 0; r < kRankedPerTweet; ++r) {
        const auto& c = rescored[r];
        const auto v = idx.verdict(c.doc_index);
        if (!v) {
            throw ValidationError("statement '" + idx.statement_id(c.doc_index) +
                                  "' has no binary verdict");
        }
        tr.top3[r] = RankedStatement{idx.statement_id(c.doc_index), c.doc_index,
                                     static_cast<int>(r + 1), c.score, *v};
    }
    return tr;
}

RetrievalOutcome retrieve_and_rank(std::span<const Tweet> tweets, const Bm25Index& idx,
                                   const RelevanceScorer& scorer, std::size_t n) {
    RetrievalOutcome out;
    for (const auto& t : tweets) {
        auto cands = top_n_candidates(t.text, idx, n);
        for (const auto& c : cands) out.candidate_pairs.emplace_back(t.tweet_id, c);
        if (cands.size() < kRankedPerTweet) {
            out.skipped.push_back({t.tweet_id, "fewer than 3 candidate statements"});
            continue;
        }
        if (scorer.external && !scorer.external->has_tweet(t.tweet_id)) {
            out.skipped.push_back({t.tweet_id, "no relevance scores"});
            continue;
        }
        out.results.push_back(rank_top3(t.tweet_id, cands, idx, scorer));
    }
    if (!out.skipped.empty()) {
        spdlog::warn("{} tweet(s) skipped during relevance ranking", out.skipped.size());
    }
    return out;
}

}  // namespace misinfo
