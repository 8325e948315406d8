#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "misinfo/corpus.hpp"
#include "misinfo/textvec.hpp"

namespace misinfo {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
};

/// Inverted index over statement_text() of each statement.
class Bm25Index {
public:
    std::size_t document_count() const { return doc_lengths_.size(); }
    double average_doc_length() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }
    const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
    const std::string& statement_id(std::size_t doc) const { return ids_[doc]; }
    std::optional<Label> verdict(std::size_t doc) const { return verdicts_[doc]; }

    /// Postings for `term`, sorted by doc; empty when the term is unknown.
    std::span<const Posting> postings(const std::string& term) const;
    std::size_t document_frequency(const std::string& term) const { return postings(term).size(); }

    /// ln(1 + (N - df + 0.5) / (df + 0.5))
    double idf(std::size_t df) const;

    const TokenizerOptions& tokenizer() const { return tokenizer_; }

private:
    friend Bm25Index build_index(std::span<const SupportingStatement>, Bm25Params,
                                 const TokenizerOptions&);

    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_lengths_;
    std::vector<std::string> ids_;
    std::vector<std::optional<Label>> verdicts_;
    double avgdl_ = 0.0;
    Bm25Params params_;
    TokenizerOptions tokenizer_;
};

/// Throws ValidationError when k1 <= 0, b outside [0,1], or every statement tokenizes empty.
Bm25Index build_index(std::span<const SupportingStatement> stmts, Bm25Params params = {},
                      const TokenizerOptions& opts = {});

/// Okapi BM25 of one document for the set of distinct query terms.
double bm25_score(const TokenStream& query, std::size_t doc_index, const Bm25Index& idx);

/// Scores of every document for the query, accumulated through the postings.
std::vector<double> bm25_score_all(const TokenStream& query, const Bm25Index& idx);

struct Candidate {
    std::size_t doc_index;
    double score;
};

inline constexpr std::size_t kDefaultCandidates = 50;
inline constexpr std::size_t kRankedPerTweet = 3;

/// Up to `n` positive-score documents, best first, ties by ascending statement id.
/// When fewer than min(3, n) score positive, unused documents are appended at score
/// 0 in ascending statement-id order until that many are present (or the index
/// runs out).
std::vector<Candidate> top_n_candidates(std::string_view tweet_text, const Bm25Index& idx,
                                        std::size_t n = kDefaultCandidates);

/// Scores loaded from a relevance file, keyed by (tweet_id, statement_id).
class ExternalScores {
public:
    void insert(const std::string& tweet_id, const std::string& statement_id, double score);
    std::optional<double> find(const std::string& tweet_id, const std::string& statement_id) const;
    bool has_tweet(const std::string& tweet_id) const { return tweets_.contains(tweet_id); }
    std::size_t size() const { return scores_.size(); }

private:
    std::map<std::pair<std::string, std::string>, double> scores_;
    std::map<std::string, std::size_t> tweets_;
};

/// JSON Lines {"tweet_id", "statement_id", "score"}. Score must be finite and >= 0;
/// duplicate pairs are rejected.
ExternalScores load_relevance_scores(const std::filesystem::path& path);

/// Relevance source: BM25 scores as-is, or an external file. A null pointer means BM25.
struct RelevanceScorer {
    const ExternalScores* external = nullptr;

    static RelevanceScorer bm25() { return {}; }
    static RelevanceScorer from(const ExternalScores& s) { return {&s}; }
};

struct RankedStatement {
    std::string statement_id;
    std::size_t doc_index = 0;
    int rank = 0;
    double relevance = 0.0;
    Label verdict = Label::Fake;
};

struct TweetResult {
    std::string tweet_id;
    std::array<RankedStatement, kRankedPerTweet> top3;
};

/// Rescores candidates and keeps the best three (ties by statement id).
/// Throws ValidationError with fewer than 3 candidates, when the external scorer
/// lacks a (tweet, statement) pair, or when a candidate has no binary verdict.
TweetResult rank_top3(const std::string& tweet_id, std::span<const Candidate> candidates,
                      const Bm25Index& idx, const RelevanceScorer& scorer);

struct SkippedTweet {
    std::string tweet_id;
    std::string reason;
};

struct RetrievalOutcome {
    std::vector<TweetResult> results;
    std::vector<SkippedTweet> skipped;
    /// Every (tweet, candidate) considered, for feeding an external relevance model.
    std::vector<std::pair<std::string, Candidate>> candidate_pairs;
};

/// Retrieval + ranking for each tweet. Tweets with fewer than 3 candidates or with
/// no rows at all in the external score file are skipped and reported; a tweet the
/// external file covers only partially is an error.
RetrievalOutcome retrieve_and_rank(std::span<const Tweet> tweets, const Bm25Index& idx,
                                   const RelevanceScorer& scorer,
                                   std::size_t n = kDefaultCandidates);

}  // namespace misinfo
