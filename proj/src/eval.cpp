#include "misinfo/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "misinfo/error.hpp"
#include "misinfo/rng.hpp"

namespace misinfo {

namespace {

double ratio(std::size_t num, std::size_t den, const char* flag, std::vector<std::string>& flags) {
    if (den == 0) {
        flags.emplace_back(flag);
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

nlohmann::json class_json(const ClassMetrics& c) {
    return {{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
}

std::string fixed(double v, int digits = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

SplitIndices split_80_20(std::span<const Label> labels, std::uint64_t seed) {
    if (labels.size() < 5) {
        throw ValidationError("80/20 split needs at least 5 rows, got " + std::to_string(labels.size()));
    }
    SplitIndices s;
    for (Label cls : {Label::Fake, Label::Real}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        if (members.size() < 2) {
            throw ValidationError("80/20 split needs at least 2 rows of class '" +
                                  std::string(to_string(cls)) + "', got " +
                                  std::to_string(members.size()));
        }
        Rng rng(derive_seed(seed, cls == Label::Fake ? 1 : 2));
        shuffle(std::span<std::size_t>(members), rng);
        const std::size_t n_test = members.size() / 5;
        s.test.insert(s.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
        s.train.insert(s.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> gold) {
    if (predicted.size() != gold.size()) {
        throw ValidationError("predictions (" + std::to_string(predicted.size()) +
                              ") and gold labels (" + std::to_string(gold.size()) + ") differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool pf = predicted[i] == Label::Fake;
        const bool gf = gold[i] == Label::Fake;
        if (pf && gf) ++cm.tp;
        else if (pf) ++cm.fp;
        else if (gf) ++cm.fn;
        else ++cm.tn;
    }
    return cm;
}

PrCurve pr_curve(std::span<const double> p_fake, std::span<const Label> gold) {
    if (p_fake.size() != gold.size()) {
        throw ValidationError("probabilities and gold labels differ in length");
    }
    std::vector<std::size_t> order(p_fake.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_fake[a] > p_fake[b]; });
    const auto positives = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), Label::Fake));
    PrCurve c;
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (gold[order[i]] == Label::Fake ? tp : fp) += 1;
        const bool last_of_threshold = i + 1 == order.size() || p_fake[order[i + 1]] != p_fake[order[i]];
        if (!last_of_threshold) continue;
        PrPoint pt;
        pt.threshold = p_fake[order[i]];
        pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        pt.recall = positives ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
        c.points.push_back(pt);
    }
    return c;
}

double average_precision(const PrCurve& c) {
    double ap = 0.0, prev_recall = 0.0;
    for (const auto& p : c.points) {
        ap += (p.recall - prev_recall) * p.precision;
        prev_recall = p.recall;
    }
    return ap;
}

MetricsReport metrics(const ConfusionMatrix& cm, std::span<const double> p_fake,
                      std::span<const Label> gold) {
    MetricsReport r;
    r.cm = cm;
    auto& flags = r.flags;
    r.fake.support = cm.tp + cm.fn;
    r.real.support = cm.tn + cm.fp;
    r.fake.precision = ratio(cm.tp, cm.tp + cm.fp, "precision_fake", flags);
    r.fake.recall = ratio(cm.tp, cm.tp + cm.fn, "recall_fake", flags);
    r.fake.f1 = harmonic(r.fake.precision, r.fake.recall);
    r.real.precision = ratio(cm.tn, cm.tn + cm.fn, "precision_real", flags);
    r.real.recall = ratio(cm.tn, cm.tn + cm.fp, "recall_real", flags);
    r.real.f1 = harmonic(r.real.precision, r.real.recall);

    const std::size_t n = cm.total();
    r.weighted.support = n;
    if (n == 0) {
        flags.emplace_back("weighted");
    } else {
        const double wf = static_cast<double>(r.fake.support) / static_cast<double>(n);
        const double wr = static_cast<double>(r.real.support) / static_cast<double>(n);
        r.weighted.precision = wf * r.fake.precision + wr * r.real.precision;
        r.weighted.recall = wf * r.fake.recall + wr * r.real.recall;
        r.weighted.f1 = wf * r.fake.f1 + wr * r.real.f1;
    }
    r.accuracy = ratio(cm.tp + cm.tn, n, "accuracy", flags);
    // 1 - recall(Fake), written so the identity holds bit for bit.
    r.fpr_paper = r.fake.support ? 1.0 - r.fake.recall : 0.0;
    if (!r.fake.support) flags.emplace_back("fpr_paper");
    r.fpr_standard = ratio(cm.fp, cm.fp + cm.tn, "fpr_standard", flags);

    if (!p_fake.empty() || !gold.empty()) {
        if (p_fake.size() != gold.size()) {
            throw ValidationError("probabilities and gold labels differ in length");
        }
        r.curve = pr_curve(p_fake, gold);
        if (std::count(gold.begin(), gold.end(), Label::Fake) == 0) flags.emplace_back("average_precision");
        r.average_precision = average_precision(*r.curve);
    }
    return r;
}

nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json j{
        {"confusion", {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"fn", r.cm.fn}, {"tn", r.cm.tn}}},
        {"fake", class_json(r.fake)},
        {"real", class_json(r.real)},
        {"weighted", class_json(r.weighted)},
        {"accuracy", r.accuracy},
        {"fpr_paper", r.fpr_paper},
        {"fpr_standard", r.fpr_standard},
        {"average_precision", r.average_precision ? nlohmann::json(*r.average_precision) : nlohmann::json()},
        {"undefined", r.flags}};
    return j;
}

std::string pr_curve_csv(const PrCurve& c) {
    std::ostringstream out;
    out << "threshold,precision,recall\n";
    char buf[96];
    for (const auto& p : c.points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.threshold, p.precision, p.recall);
        out << buf;
    }
    return out.str();
}

std::vector<ComparisonRow> compare_models(std::vector<std::pair<std::string, MetricsReport>> results) {
    std::vector<ComparisonRow> rows;
    rows.reserve(results.size());
    for (auto& [name, rep] : results) rows.push_back({std::move(name), std::move(rep)});
    std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.report.weighted.f1 != b.report.weighted.f1) return a.report.weighted.f1 > b.report.weighted.f1;
        return a.name < b.name;
    });
    return rows;
}

nlohmann::json to_json(const std::vector<ComparisonRow>& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : table) arr.push_back({{"model", row.name}, {"metrics", to_json(row.report)}});
    return arr;
}

std::string render_table(const std::vector<ComparisonRow>& table) {
    std::size_t width = 5;
    for (const auto& r : table) width = std::max(width, r.name.size());
    std::ostringstream out;
    auto cell = [&](const std::string& s, std::size_t w) {
        out << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    cell("model", width + 2);
    for (const char* h : {"P(w)", "R(w)", "F1(w)", "P(fake)", "R(fake)", "F1(fake)", "FPR"}) cell(h, 10);
    out << '\n';
    for (const auto& r : table) {
        cell(r.name, width + 2);
        for (double v : {r.report.weighted.precision, r.report.weighted.recall, r.report.weighted.f1,
                         r.report.fake.precision, r.report.fake.recall, r.report.fake.f1,
                         r.report.fpr_paper}) {
            cell(fixed(v), 10);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace misinfo
