#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "misinfo/features.hpp"
#include "misinfo/learners.hpp"

namespace misinfo {

enum class ModelKind { Knn, DecisionTree, RandomForest, GaussianNB, LogisticRegression, StackedEnsemble };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct ModelConfig {
    int knn_k = 5;
    std::optional<int> tree_max_depth;  // unlimited when empty
    int tree_min_samples_split = 2;
    int rf_trees = 100;
    std::string rf_feature_subset = "sqrt";
    double lr_l2 = 1.0;
    int lr_max_iters = 1000;
    double lr_tolerance = 1e-6;
    int stack_folds = 5;
    std::uint64_t seed = 0;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; unknown keys are rejected.
    static ModelConfig from_json(const nlohmann::json& j);
};

struct Prediction {
    Label label = Label::Fake;
    double p_fake = 0.0;
};

inline Label label_for(double p_fake) { return p_fake >= 0.5 ? Label::Fake : Label::Real; }

using WeakParams = std::variant<learners::Knn, learners::DecisionTree, learners::RandomForest,
                                learners::GaussianNB, learners::LogisticRegression>;

struct StackParams {
    std::vector<ModelKind> weak_kinds;
    std::vector<WeakParams> weak;  // retrained on all rows
    learners::LogisticRegression meta;
};

using ModelParams = std::variant<learners::Knn, learners::DecisionTree, learners::RandomForest,
                                 learners::GaussianNB, learners::LogisticRegression, StackParams>;

double weak_p_fake(const WeakParams& w, std::span<const double> row);

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
    ModelKind kind = ModelKind::DecisionTree;
    ModelParams params;
    FeatureSignature signature;
    ModelConfig config;
    int format_version = kModelFormatVersion;

    /// No signature check; callers go through predict().
    double p_fake(std::span<const double> row) const;
};

/// ≥ 2 rows. A single class is accepted for every kind; logistic regression then
/// becomes a constant predictor and logs a warning.
TrainedModel train(ModelKind kind, const Matrix& X, const FeatureSignature& sig,
                   std::span<const Label> y, const ModelConfig& cfg);
TrainedModel train(ModelKind kind, const FeatureMatrix& X, const ModelConfig& cfg);

/// Throws ValidationError when `sig` differs from the model's or the column count
/// does not match it.
std::vector<Prediction> predict(const TrainedModel& m, const Matrix& X, const FeatureSignature& sig);
std::vector<Prediction> predict(const TrainedModel& m, const FeatureMatrix& X);

/// Fold index per row. Each class is shuffled separately and dealt round-robin,
/// the dealing position carrying over from one class to the next. Needs every
/// class to have ≥ 2 rows and at least `folds` rows overall.
std::vector<int> stratified_folds(std::span<const Label> y, int folds, std::uint64_t seed);

inline const std::vector<ModelKind>& default_weak_kinds() {
    static const std::vector<ModelKind> k{ModelKind::DecisionTree, ModelKind::RandomForest};
    return k;
}

struct StackTraining {
    TrainedModel model;
    Matrix meta_features;  // n x |weak|, out-of-fold p_fake
    std::vector<int> folds;
};

/// Out-of-fold stacking with a logistic meta-learner. Fold k's learners are seeded
/// with derive_seed(cfg.seed, k + 1); the final learners use cfg.seed.
StackTraining train_stack_detailed(std::span<const ModelKind> weak_kinds, const Matrix& X,
                                   const FeatureSignature& sig, std::span<const Label> y,
                                   const ModelConfig& cfg);
TrainedModel train_stack(std::span<const ModelKind> weak_kinds, const Matrix& X,
                         const FeatureSignature& sig, std::span<const Label> y,
                         const ModelConfig& cfg);
TrainedModel train_stack(const FeatureMatrix& X, const ModelConfig& cfg,
                         std::span<const ModelKind> weak_kinds = default_weak_kinds());

nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& m, const std::filesystem::path& path);
/// Throws ValidationError on a corrupt file or unsupported format_version.
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace misinfo
