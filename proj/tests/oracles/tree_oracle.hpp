#pragma once

// Exhaustive CART reference for tiny fixtures. Every (feature, midpoint) pair is
// scored as an exact fraction 2*f*r/n summed over both children; the lowest wins,
// with the earliest feature and then the lowest threshold kept on ties.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    double p_fake = 0.0;
    std::size_t samples = 0;
    int left = -1;
    int right = -1;
};

struct TinyData {
    std::vector<std::vector<double>> x;
    std::vector<bool> fake;
};

class ExhaustiveTree {
public:
    ExhaustiveTree(const TinyData& d, std::optional<int> max_depth, int min_samples_split)
        : d_(d), max_depth_(max_depth), min_split_(min_samples_split) {
        std::vector<std::size_t> all(d.x.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        build(all, 0);
    }

    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    struct Frac {
        std::int64_t num;
        std::int64_t den;
        bool operator<(const Frac& o) const { return num * o.den < o.num * den; }
    };

    int build(const std::vector<std::size_t>& rows, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        std::size_t nf = 0;
        for (auto r : rows) nf += d_.fake[r];
        nodes_[id].samples = rows.size();
        nodes_[id].p_fake = static_cast<double>(nf) / static_cast<double>(rows.size());
        if (nf == 0 || nf == rows.size()) return id;
        if (max_depth_ && depth >= *max_depth_) return id;
        if (static_cast<int>(rows.size()) < min_split_) return id;

        bool found = false;
        Frac best{0, 1};
        int best_f = -1;
        double best_t = 0;
        const std::size_t features = d_.x.front().size();
        for (std::size_t f = 0; f < features; ++f) {
            std::set<double> values;
            for (auto r : rows) values.insert(d_.x[r][f]);
            std::vector<double> v(values.begin(), values.end());
            for (std::size_t k = 0; k + 1 < v.size(); ++k) {
                const double t = (v[k] + v[k + 1]) / 2.0;
                std::int64_t ln = 0, lf = 0, rn = 0, rf = 0;
                for (auto r : rows) {
                    if (d_.x[r][f] <= t) { ++ln; lf += d_.fake[r]; }
                    else { ++rn; rf += d_.fake[r]; }
                }
                // 2 lf (ln - lf) / ln + 2 rf (rn - rf) / rn
                const Frac g{2 * lf * (ln - lf) * rn + 2 * rf * (rn - rf) * ln, ln * rn};
                if (!found || g < best) {
                    found = true;
                    best = g;
                    best_f = static_cast<int>(f);
                    best_t = t;
                }
            }
        }
        if (!found) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) (d_.x[r][static_cast<std::size_t>(best_f)] <= best_t ? left : right).push_back(r);
        nodes_[id].feature = best_f;
        nodes_[id].threshold = best_t;
        const int l = build(left, depth + 1);
        const int rr = build(right, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = rr;
        return id;
    }

    const TinyData& d_;
    std::optional<int> max_depth_;
    int min_split_;
    std::vector<TreeNode> nodes_;
};

}  // namespace oracle
