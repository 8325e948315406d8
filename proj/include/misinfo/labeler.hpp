#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "misinfo/annotator.hpp"
#include "misinfo/retrieval.hpp"

namespace misinfo {

enum class VotingMethod { RegularMajority, WeightedMajority };

std::string_view to_string(VotingMethod m);
VotingMethod parse_voting_method(std::string_view s);

/// Cosine sums at or below this fall back to the unweighted vote.
inline constexpr double kCosineSumEpsilon = 1e-9;

struct VoteEvidence {
    std::string statement_id;
    int rank = 0;
    double relevance = 0.0;
    double cosine_weight = 0.0;  // clamped cosine, before normalization
    Label verdict = Label::Fake;
};

struct LabelRecord {
    std::string tweet_id;
    Label label = Label::Fake;
    VotingMethod method = VotingMethod::RegularMajority;
    BodyMode body_mode = BodyMode::WithoutBody;
    std::array<VoteEvidence, kRankedPerTweet> evidence;
    double score_fake = 0.0;
    double score_real = 0.0;
    bool fallback = false;
};

nlohmann::json to_json(const LabelRecord& r);
LabelRecord label_from_json(const nlohmann::json& j, std::string_view where);

/// Label held by at least two of the three verdicts.
Label majority_label(const std::array<Label, kRankedPerTweet>& verdicts);

struct WeightedVote {
    Label label = Label::Fake;
    double score_fake = 0.0;
    double score_real = 0.0;
    bool fallback = false;
};

/// Cosines are clamped at 0 and normalized by their sum; each normalized weight
/// times the relevance is added to the score of that statement's verdict. Ties
/// go to Fake. A cosine sum <= kCosineSumEpsilon falls back to majority_label.
WeightedVote weighted_vote(const std::array<Label, kRankedPerTweet>& verdicts,
                           const std::array<double, kRankedPerTweet>& cosines,
                           const std::array<double, kRankedPerTweet>& relevances);

/// Embeds tweets and statements for the weighted vote.
class VotingContext {
public:
    VotingContext(const TextEmbedder& embedder, std::span<const Tweet> tweets,
                  std::span<const SupportingStatement> stmts,
                  StatementField field = StatementField::Title);

    double cosine(const std::string& tweet_id, const std::string& statement_id) const;

private:
    const TextEmbedder& embedder_;
    StatementField field_;
    std::map<std::string, const Tweet*> tweets_;
    std::map<std::string, const SupportingStatement*> stmts_;
};

LabelRecord regular_majority(const TweetResult& tr, BodyMode mode = BodyMode::WithoutBody);

/// Throws ValidationError on a negative or non-finite relevance.
LabelRecord weighted_majority(const TweetResult& tr, const VotingContext& ctx,
                              BodyMode mode = BodyMode::WithoutBody);

struct LabelSummary {
    std::size_t fake = 0;
    std::size_t real = 0;
    std::size_t fallback = 0;
};

struct LabeledData {
    std::vector<LabelRecord> records;
    LabelSummary summary;
};

/// `ctx` may be null for RegularMajority.
LabeledData label_corpus(std::span<const TweetResult> results, VotingMethod method,
                         BodyMode mode, const VotingContext* ctx);

void write_labels(const std::filesystem::path& path, std::span<const LabelRecord> recs);
std::vector<LabelRecord> load_labels(const std::filesystem::path& path);

/// Index 1..4 of the four labeled datasets: (without body, regular), (without body,
/// weighted), (with body, regular), (with body, weighted).
int labeled_data_index(BodyMode mode, VotingMethod method);

}  // namespace misinfo
