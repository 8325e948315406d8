#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "misinfo/types.hpp"

namespace misinfo {

struct SplitIndices {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Stratified 80/20 split: within each class, after a seeded shuffle, the first
/// floor(0.2 * count) rows go to test. Needs ≥ 5 rows and ≥ 2 of each class.
SplitIndices split_80_20(std::span<const Label> labels, std::uint64_t seed);

struct ConfusionMatrix {
    std::size_t tp = 0;  // Fake predicted Fake
    std::size_t fp = 0;  // Real predicted Fake
    std::size_t fn = 0;  // Fake predicted Real
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> gold);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// One point per distinct p_fake, thresholds descending; a row counts as Fake when
/// p_fake >= threshold.
struct PrCurve {
    std::vector<PrPoint> points;
};

PrCurve pr_curve(std::span<const double> p_fake, std::span<const Label> gold);

/// Step-wise sum of (R_k - R_{k-1}) * P_k with R_0 = 0.
double average_precision(const PrCurve& c);

struct MetricsReport {
    ConfusionMatrix cm;
    ClassMetrics fake;
    ClassMetrics real;
    ClassMetrics weighted;  // support-weighted means; support = total
    double accuracy = 0.0;
    double fpr_paper = 0.0;     // fn / (tp + fn)
    double fpr_standard = 0.0;  // fp / (fp + tn)
    std::optional<double> average_precision;
    std::optional<PrCurve> curve;
    std::vector<std::string> flags;  // names of ratios whose denominator was 0
};

/// Probabilities and gold labels, when given, must be aligned with each other and
/// drive the PR curve and average precision.
MetricsReport metrics(const ConfusionMatrix& cm, std::span<const double> p_fake = {},
                      std::span<const Label> gold = {});

nlohmann::json to_json(const MetricsReport& r);
std::string pr_curve_csv(const PrCurve& c);

struct ComparisonRow {
    std::string name;
    MetricsReport report;
};

/// Sorted by weighted F1 descending, ties by name.
std::vector<ComparisonRow> compare_models(std::vector<std::pair<std::string, MetricsReport>> results);

nlohmann::json to_json(const std::vector<ComparisonRow>& table);
/// Fixed-width text table of the weighted and Fake-class columns.
std::string render_table(const std::vector<ComparisonRow>& table);

}  // namespace misinfo
