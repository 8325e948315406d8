#pragma once

// Classification metrics by counting label pairs one row at a time.

#include <cstddef>
#include <vector>

namespace oracle {

struct Counted {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision_fake = 0, recall_fake = 0, f1_fake = 0;
    double precision_real = 0, recall_real = 0, f1_real = 0;
    double weighted_precision = 0, weighted_recall = 0, weighted_f1 = 0;
    double accuracy = 0;
    double fpr_standard = 0;
};

// `pred_fake[i]` and `gold_fake[i]` describe row i. Zero denominators give 0.
inline Counted count_metrics(const std::vector<bool>& pred_fake, const std::vector<bool>& gold_fake) {
    Counted c;
    std::size_t pred_f = 0, pred_r = 0, gold_f = 0, gold_r = 0, agree = 0;
    for (std::size_t i = 0; i < pred_fake.size(); ++i) {
        const bool p = pred_fake[i], g = gold_fake[i];
        if (p && g) ++c.tp;
        if (p && !g) ++c.fp;
        if (!p && g) ++c.fn;
        if (!p && !g) ++c.tn;
        pred_f += p;
        pred_r += !p;
        gold_f += g;
        gold_r += !g;
        agree += p == g;
    }
    auto div = [](std::size_t a, std::size_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    auto f1 = [](std::size_t tp, std::size_t fp, std::size_t fn) {
        return tp ? 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
    };
    c.precision_fake = div(c.tp, pred_f);
    c.recall_fake = div(c.tp, gold_f);
    c.f1_fake = f1(c.tp, c.fp, c.fn);
    c.precision_real = div(c.tn, pred_r);
    c.recall_real = div(c.tn, gold_r);
    c.f1_real = f1(c.tn, c.fn, c.fp);
    const std::size_t n = pred_fake.size();
    if (n) {
        const double dn = static_cast<double>(n);
        c.weighted_precision = (static_cast<double>(gold_f) * c.precision_fake + static_cast<double>(gold_r) * c.precision_real) / dn;
        c.weighted_recall = (static_cast<double>(gold_f) * c.recall_fake + static_cast<double>(gold_r) * c.recall_real) / dn;
        c.weighted_f1 = (static_cast<double>(gold_f) * c.f1_fake + static_cast<double>(gold_r) * c.f1_real) / dn;
    }
    c.accuracy = div(agree, n);
    c.fpr_standard = div(c.fp, gold_r);
    return c;
}

}  // namespace oracle
