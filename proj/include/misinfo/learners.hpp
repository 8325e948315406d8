#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "misinfo/matrix.hpp"
#include "misinfo/rng.hpp"
#include "misinfo/types.hpp"

// Plain learners over a dense matrix with Fake as the positive class. Each one
// produces p_fake per row; TrainedModel wraps them with config and signature.
namespace misinfo::learners {

/// k nearest rows by Euclidean distance; p_fake is the Fake share among them.
/// Distance ties go to the lower training index.
struct Knn {
    int k = 5;
    Matrix points;
    std::vector<std::uint8_t> is_fake;

    static Knn fit(const Matrix& X, std::span<const Label> y, int k);
    double p_fake(std::span<const double> row) const;

    nlohmann::json to_json() const;
    static Knn from_json(const nlohmann::json& j);
};

struct TreeOptions {
    std::optional<int> max_depth;  // unlimited when empty
    int min_samples_split = 2;
    /// Features examined per split; 0 means all, in index order. Otherwise
    /// features are visited in random order until this many non-constant ones
    /// have been evaluated.
    std::size_t max_features = 0;
};

struct TreeNode {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;  // x <= threshold goes left
    int left = -1;
    int right = -1;
    double p_fake = 0.0;
    std::size_t samples = 0;
};

/// CART with Gini impurity. Splits sit at midpoints between adjacent distinct
/// values; the split with the lowest weighted child impurity wins, earlier
/// features and lower thresholds on ties. Any impure node with a valid split is
/// split, down to depth / min-samples limits.
struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    /// `rows` selects (possibly repeated) training rows; empty means all rows.
    /// `rng` is required iff opts.max_features > 0.
    static DecisionTree fit(const Matrix& X, std::span<const Label> y,
                            std::span<const std::size_t> rows, const TreeOptions& opts,
                            Rng* rng = nullptr);

    double p_fake(std::span<const double> row) const;
    std::size_t depth() const;

    nlohmann::json to_json() const;
    static DecisionTree from_json(const nlohmann::json& j);
};

/// Weighted child impurity n_l * gini_l + n_r * gini_r from class counts.
double weighted_child_gini(std::size_t left_n, std::size_t left_fake, std::size_t right_n,
                           std::size_t right_fake);

/// Bootstrap forest; tree t draws from Rng(seed + t).
struct RandomForest {
    std::vector<DecisionTree> trees;

    static RandomForest fit(const Matrix& X, std::span<const Label> y, int n_trees,
                            const TreeOptions& opts, std::uint64_t seed);
    double p_fake(std::span<const double> row) const;

    nlohmann::json to_json() const;
    static RandomForest from_json(const nlohmann::json& j);
};

inline constexpr double kNbVarianceFloor = 1e-9;

/// Gaussian naive Bayes; class 0 = Fake, 1 = Real.
struct GaussianNB {
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;
    std::array<bool, 2> present{};

    static GaussianNB fit(const Matrix& X, std::span<const Label> y);
    /// (P(Fake|x), P(Real|x)).
    std::array<double, 2> posterior(std::span<const double> row) const;
    double p_fake(std::span<const double> row) const { return posterior(row)[0]; }

    nlohmann::json to_json() const;
    static GaussianNB from_json(const nlohmann::json& j);
};

struct LogisticOptions {
    double l2 = 1.0;
    int max_iters = 1000;
    double tolerance = 1e-6;
};

/// Mean log-loss plus (l2 / 2n) * |w|^2; the intercept is not penalized.
/// A single-class training set yields a constant predictor.
struct LogisticRegression {
    std::vector<double> weights;
    double intercept = 0.0;
    int iterations = 0;
    bool converged = false;
    double gradient_max_norm = 0.0;
    std::optional<double> constant;  // set for single-class fits

    static LogisticRegression fit(const Matrix& X, std::span<const Label> y,
                                  const LogisticOptions& opts);
    double p_fake(std::span<const double> row) const;

    nlohmann::json to_json() const;
    static LogisticRegression from_json(const nlohmann::json& j);
};

/// Objective and gradient at parameters theta = (w..., b).
double logistic_objective(const Matrix& X, std::span<const Label> y,
                          std::span<const double> theta, double l2);
std::vector<double> logistic_gradient(const Matrix& X, std::span<const Label> y,
                                      std::span<const double> theta, double l2);

double sigmoid(double z);

/// MISINFO_THREADS when set to a positive integer, else the hardware thread count.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on a small thread pool. fn must only write state
/// owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace misinfo::learners
