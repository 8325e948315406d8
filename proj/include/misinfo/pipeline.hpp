#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "misinfo/annotator.hpp"
#include "misinfo/labeler.hpp"
#include "misinfo/models.hpp"

namespace misinfo::pipeline {

inline constexpr std::string_view kToolkitVersion = MISINFO_VERSION;

struct PipelineConfig {
    // Paths, resolved against the config file's directory.
    std::filesystem::path tweets;
    std::filesystem::path statements;
    std::optional<std::filesystem::path> trusted_sources;
    std::optional<std::filesystem::path> verdict_mapping;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> relevance_scores;
    std::optional<std::filesystem::path> gold_tweets;
    std::optional<std::filesystem::path> bot_scores;
    std::optional<std::filesystem::path> account_status;
    std::filesystem::path output_dir = "out";

    FilterSpec filters;
    std::string text_backend = "tfidf";   // "tfidf" | "store"
    std::string scorer_backend = "bm25";  // "bm25" | "external"
    StatementField statement_field = StatementField::Title;
    std::size_t max_features = kDefaultMaxFeatures;
    std::size_t candidates = kDefaultCandidates;

    double cosine_threshold = kDefaultCosineThreshold;
    std::vector<double> calibration_thresholds{0.5, 0.7, 0.85, 0.9};
    std::vector<int> label_variants{1, 2, 3, 4};
    int train_dataset = 3;
    std::vector<ModelKind> weak_learners = default_weak_kinds();

    double bot_threshold = 0.5;
    std::vector<double> bot_sweep{0.5, 0.6, 0.7, 0.8, 0.9};
    std::string snapshot_a = "A";
    std::string snapshot_b = "B";

    ModelConfig model;
    std::uint64_t seed = 42;

    /// Effective settings as written. Paths stay relative to the config file.
    nlohmann::json echo;
    /// FNV-1a of `echo` without output_dir.
    std::string config_hash;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold;
    std::optional<std::filesystem::path> out;
};

/// Subcommands in stage order, with one-line descriptions.
inline const std::vector<std::pair<std::string, std::string>>& subcommands() {
    static const std::vector<std::pair<std::string, std::string>> s{
        {"ingest", "validate and filter the corpora, write manifest.json"},
        {"group-verdicts", "map raw fact-check verdicts to fake/real/discard"},
        {"annotate", "trusted-source and cosine-similarity annotation"},
        {"label", "BM25 retrieval, top-3 ranking and majority voting"},
        {"train", "fit the stacked ensemble and the weak-learner ladder"},
        {"evaluate", "held-out metrics and PR curve for the trained model"},
        {"bot-report", "bot fractions, threshold sweep and snapshot comparison"},
        {"pipeline", "every stage above, in order"}};
    return s;
}

/// `--threshold` applies to the cosine threshold for annotate and pipeline and to
/// the bot threshold for bot-report; other subcommands ignore it.
PipelineConfig load_config(const std::filesystem::path& path, std::string_view subcommand,
                           const Overrides& o = {});
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                            std::string_view subcommand, const Overrides& o = {});

/// Runs one stage (or all of them for "pipeline"); throws misinfo errors.
void run_stage(std::string_view subcommand, const PipelineConfig& cfg);

/// load_config + run_stage with exceptions mapped to exit codes: 0 ok,
/// 1 validation error or unknown subcommand, 2 runtime error.
int run(std::string_view subcommand, const std::filesystem::path& config, const Overrides& o = {});

/// Reads the log level from MISINFO_LOG_LEVEL (trace, debug, info, warn, error, off).
void configure_logging();

/// Artifact names run_digest.json may list, in digest order.
const std::vector<std::string>& artifact_names();

}  // namespace misinfo::pipeline
