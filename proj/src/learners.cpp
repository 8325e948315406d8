#include "misinfo/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

#include "misinfo/error.hpp"

namespace misinfo::learners {

namespace {

bool fake(Label l) { return l == Label::Fake; }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void require_aligned(const Matrix& X, std::span<const Label> y) {
    if (X.rows() != y.size()) {
        throw ValidationError("feature rows (" + std::to_string(X.rows()) + ") and labels (" +
                              std::to_string(y.size()) + ") differ");
    }
    if (X.rows() == 0) throw ValidationError("cannot train on an empty matrix");
}

template <typename T>
T get(const nlohmann::json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model parameters (") + key + "): " + e.what());
    }
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const Label> y, const TreeOptions& opts, Rng* rng)
        : X_(X), y_(y), opts_(opts), rng_(rng) {
        features_.resize(X.cols());
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        rows_ = std::move(rows);
        tree_.nodes.clear();
        grow(0, rows_.size(), 0);
        return std::move(tree_);
    }

private:
    // Weighted child impurity is n - P/Q with P = (fl^2 + rl^2) nr + (fr^2 + rr^2) nl
    // and Q = nl nr, so splits are ranked by P/Q through exact integer cross products.
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        std::uint64_t p = 0;
        std::uint64_t q = 1;

        bool beaten_by(std::uint64_t p2, std::uint64_t q2) const {
            if (feature < 0) return true;
            using u128 = unsigned __int128;
            return static_cast<u128>(p2) * q > static_cast<u128>(p) * q2;
        }
    };

    int grow(std::size_t begin, std::size_t end, int depth) {
        const std::size_t n = end - begin;
        std::size_t n_fake = 0;
        for (std::size_t i = begin; i < end; ++i) n_fake += fake(y_[rows_[i]]);

        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes[id].samples = n;
        tree_.nodes[id].p_fake = static_cast<double>(n_fake) / static_cast<double>(n);

        const bool pure = n_fake == 0 || n_fake == n;
        const bool too_deep = opts_.max_depth && depth >= *opts_.max_depth;
        if (pure || too_deep || n < static_cast<std::size_t>(opts_.min_samples_split)) return id;

        const Split best = find_split(begin, end, n_fake);
        if (best.feature < 0) return id;

        const auto mid = std::partition(
            rows_.begin() + static_cast<std::ptrdiff_t>(begin),
            rows_.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t r) { return X_(r, static_cast<std::size_t>(best.feature)) <= best.threshold; });
        const auto cut = static_cast<std::size_t>(mid - rows_.begin());

        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].threshold = best.threshold;
        const int l = grow(begin, cut, depth + 1);
        const int r = grow(cut, end, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    // Returns true when the feature had at least two distinct values in the node.
    bool evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, std::size_t n_fake,
                          Split& best) {
        const std::size_t n = end - begin;
        column_.clear();
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = rows_[i];
            column_.emplace_back(X_(r, f), fake(y_[r]));
        }
        std::sort(column_.begin(), column_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (column_.front().first == column_.back().first) return false;

        std::size_t left_fake = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_fake += column_[i].second;
            const double a = column_[i].first;
            const double b = column_[i + 1].first;
            if (!(a < b)) continue;
            const std::uint64_t nl = i + 1;
            const std::uint64_t nr = n - nl;
            const std::uint64_t fl = left_fake;
            const std::uint64_t fr = n_fake - left_fake;
            const std::uint64_t sl = fl * fl + (nl - fl) * (nl - fl);
            const std::uint64_t sr = fr * fr + (nr - fr) * (nr - fr);
            const std::uint64_t p = sl * nr + sr * nl;
            const std::uint64_t q = nl * nr;
            if (best.beaten_by(p, q)) {
                double t = a + (b - a) / 2.0;
                if (!(t >= a && t < b)) t = a;
                best = {static_cast<int>(f), t, p, q};
            }
        }
        return true;
    }

    Split find_split(std::size_t begin, std::size_t end, std::size_t n_fake) {
        Split best;
        const std::size_t nf = features_.size();
        if (opts_.max_features == 0 || opts_.max_features >= nf) {
            for (std::size_t f = 0; f < nf; ++f) evaluate_feature(f, begin, end, n_fake, best);
            return best;
        }
        // Visit features in a random order until enough non-constant ones were seen.
        std::size_t informative = 0;
        for (std::size_t i = 0; i < nf && informative < opts_.max_features; ++i) {
            const auto j = i + uniform_index(*rng_, nf - i);
            std::swap(features_[i], features_[j]);
            if (evaluate_feature(features_[i], begin, end, n_fake, best)) ++informative;
        }
        return best;
    }

    const Matrix& X_;
    std::span<const Label> y_;
    TreeOptions opts_;
    Rng* rng_;
    std::vector<std::size_t> features_;
    std::vector<std::size_t> rows_;
    std::vector<std::pair<double, bool>> column_;
    DecisionTree tree_;
};

}  // namespace

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::size_t worker_count() {
    if (const char* env = std::getenv("MISINFO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t hw = worker_count();
    const std::size_t workers = std::min(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// ---------------------------------------------------------------- knn

Knn Knn::fit(const Matrix& X, std::span<const Label> y, int k) {
    require_aligned(X, y);
    if (k < 1) throw ValidationError("knn k must be positive");
    Knn m;
    m.k = k;
    m.points = X;
    m.is_fake.reserve(y.size());
    for (auto l : y) m.is_fake.push_back(fake(l));
    return m;
}

double Knn::p_fake(std::span<const double> row) const {
    const std::size_t n = points.rows();
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    std::vector<std::pair<double, std::size_t>> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = {squared_distance(row, points.row(i)), i};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    std::size_t fakes = 0;
    for (std::size_t i = 0; i < kk; ++i) fakes += is_fake[d[i].second];
    return static_cast<double>(fakes) / static_cast<double>(kk);
}

nlohmann::json Knn::to_json() const {
    return {{"k", k},
            {"rows", points.rows()},
            {"cols", points.cols()},
            {"points", points.data()},
            {"is_fake", is_fake}};
}

Knn Knn::from_json(const nlohmann::json& j) {
    Knn m;
    m.k = get<int>(j, "k");
    const auto rows = get<std::size_t>(j, "rows");
    const auto cols = get<std::size_t>(j, "cols");
    const auto data = get<std::vector<double>>(j, "points");
    m.is_fake = get<std::vector<std::uint8_t>>(j, "is_fake");
    if (data.size() != rows * cols || m.is_fake.size() != rows || rows == 0 || m.k < 1) {
        throw ValidationError("malformed knn parameters");
    }
    m.points = Matrix(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m.points(r, c) = data[r * cols + c];
    return m;
}

// ---------------------------------------------------------------- tree

double weighted_child_gini(std::size_t left_n, std::size_t left_fake, std::size_t right_n,
                           std::size_t right_fake) {
    auto part = [](std::size_t n, std::size_t f) {
        const double dn = static_cast<double>(n);
        const double df = static_cast<double>(f);
        const double dr = dn - df;
        return dn - (df * df + dr * dr) / dn;
    };
    return part(left_n, left_fake) + part(right_n, right_fake);
}

DecisionTree DecisionTree::fit(const Matrix& X, std::span<const Label> y,
                               std::span<const std::size_t> rows, const TreeOptions& opts,
                               Rng* rng) {
    require_aligned(X, y);
    if (opts.min_samples_split < 2) throw ValidationError("min_samples_split must be >= 2");
    if (opts.max_depth && *opts.max_depth < 0) throw ValidationError("max_depth must be >= 0");
    if (opts.max_features > 0 && !rng) throw ValidationError("feature subsampling needs an rng");
    std::vector<std::size_t> r;
    if (rows.empty()) {
        r.resize(X.rows());
        std::iota(r.begin(), r.end(), 0);
    } else {
        r.assign(rows.begin(), rows.end());
    }
    return TreeBuilder(X, y, opts, rng).build(std::move(r));
}

double DecisionTree::p_fake(std::span<const double> row) const {
    int i = 0;
    while (nodes[i].feature >= 0) {
        i = row[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                   : nodes[i].right;
    }
    return nodes[i].p_fake;
}

std::size_t DecisionTree::depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes[i].feature >= 0) {
            stack.emplace_back(nodes[i].left, d + 1);
            stack.emplace_back(nodes[i].right, d + 1);
        }
    }
    return best;
}

nlohmann::json DecisionTree::to_json() const {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, p;
    std::vector<std::size_t> samples;
    for (const auto& n : nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        p.push_back(n.p_fake);
        samples.push_back(n.samples);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left},
            {"right", right},     {"p_fake", p},            {"samples", samples}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
    const auto feature = get<std::vector<int>>(j, "feature");
    const auto threshold = get<std::vector<double>>(j, "threshold");
    const auto left = get<std::vector<int>>(j, "left");
    const auto right = get<std::vector<int>>(j, "right");
    const auto p = get<std::vector<double>>(j, "p_fake");
    const auto samples = get<std::vector<std::size_t>>(j, "samples");
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
        p.size() != n || samples.size() != n) {
        throw ValidationError("malformed tree parameters");
    }
    DecisionTree t;
    t.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool split = feature[i] >= 0;
        if (split) {
            const auto in_range = [&](int c) {
                return c > static_cast<int>(i) && c < static_cast<int>(n);
            };
            if (!in_range(left[i]) || !in_range(right[i])) {
                throw ValidationError("malformed tree: bad child index");
            }
        }
        t.nodes[i] = {feature[i], threshold[i], left[i], right[i], p[i], samples[i]};
    }
    return t;
}

// ---------------------------------------------------------------- forest

RandomForest RandomForest::fit(const Matrix& X, std::span<const Label> y, int n_trees,
                               const TreeOptions& opts, std::uint64_t seed) {
    require_aligned(X, y);
    if (n_trees < 1) throw ValidationError("random forest needs at least one tree");
    TreeOptions tree_opts = opts;
    if (tree_opts.max_features == 0) {
        tree_opts.max_features = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
    }
    RandomForest f;
    f.trees.resize(static_cast<std::size_t>(n_trees));
    parallel_for(f.trees.size(), [&](std::size_t t) {
        Rng rng(seed + t);
        std::vector<std::size_t> sample(X.rows());
        for (auto& s : sample) s = uniform_index(rng, X.rows());
        f.trees[t] = DecisionTree::fit(X, y, sample, tree_opts, &rng);
    });
    return f;
}

double RandomForest::p_fake(std::span<const double> row) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.p_fake(row);
    return s / static_cast<double>(trees.size());
}

nlohmann::json RandomForest::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return {{"trees", arr}};
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
    RandomForest f;
    const auto it = j.find("trees");
    if (it == j.end() || !it->is_array() || it->empty()) throw ValidationError("malformed forest");
    for (const auto& t : *it) f.trees.push_back(DecisionTree::from_json(t));
    return f;
}

// ---------------------------------------------------------------- naive bayes

GaussianNB GaussianNB::fit(const Matrix& X, std::span<const Label> y) {
    require_aligned(X, y);
    GaussianNB m;
    const std::size_t d = X.cols();
    std::array<std::size_t, 2> count{};
    for (std::size_t c = 0; c < 2; ++c) {
        m.mean[c].assign(d, 0.0);
        m.var[c].assign(d, 0.0);
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const std::size_t c = fake(y[r]) ? 0 : 1;
        ++count[c];
        for (std::size_t k = 0; k < d; ++k) m.mean[c][k] += X(r, k);
    }
    for (std::size_t c = 0; c < 2; ++c) {
        m.present[c] = count[c] > 0;
        if (!m.present[c]) continue;
        for (auto& v : m.mean[c]) v /= static_cast<double>(count[c]);
    }
    for (std::size_t r = 0; r < X.rows(); ++r) {
        const std::size_t c = fake(y[r]) ? 0 : 1;
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = X(r, k) - m.mean[c][k];
            m.var[c][k] += diff * diff;
        }
    }
    const double n = static_cast<double>(X.rows());
    for (std::size_t c = 0; c < 2; ++c) {
        if (!m.present[c]) {
            m.log_prior[c] = -std::numeric_limits<double>::infinity();
            continue;
        }
        for (auto& v : m.var[c]) v = std::max(v / static_cast<double>(count[c]), kNbVarianceFloor);
        m.log_prior[c] = std::log(static_cast<double>(count[c]) / n);
    }
    return m;
}

std::array<double, 2> GaussianNB::posterior(std::span<const double> row) const {
    if (!present[0]) return {0.0, 1.0};
    if (!present[1]) return {1.0, 0.0};
    std::array<double, 2> ll{};
    constexpr double log_2pi = 1.8378770664093453;
    for (std::size_t c = 0; c < 2; ++c) {
        double s = log_prior[c];
        for (std::size_t k = 0; k < row.size(); ++k) {
            const double diff = row[k] - mean[c][k];
            s -= 0.5 * (log_2pi + std::log(var[c][k])) + diff * diff / (2.0 * var[c][k]);
        }
        ll[c] = s;
    }
    const double mx = std::max(ll[0], ll[1]);
    const double e0 = std::exp(ll[0] - mx);
    const double e1 = std::exp(ll[1] - mx);
    const double p0 = e0 / (e0 + e1);
    return {p0, 1.0 - p0};
}

nlohmann::json GaussianNB::to_json() const {
    auto prior = [&](std::size_t c) {
        return present[c] ? nlohmann::json(log_prior[c]) : nlohmann::json(nullptr);
    };
    return {{"log_prior", {prior(0), prior(1)}},
            {"mean_fake", mean[0]},
            {"mean_real", mean[1]},
            {"var_fake", var[0]},
            {"var_real", var[1]}};
}

GaussianNB GaussianNB::from_json(const nlohmann::json& j) {
    GaussianNB m;
    const auto it = j.find("log_prior");
    if (it == j.end() || !it->is_array() || it->size() != 2) throw ValidationError("malformed naive bayes");
    for (std::size_t c = 0; c < 2; ++c) {
        m.present[c] = !(*it)[c].is_null();
        m.log_prior[c] = m.present[c] ? (*it)[c].get<double>()
                                      : -std::numeric_limits<double>::infinity();
    }
    m.mean[0] = get<std::vector<double>>(j, "mean_fake");
    m.mean[1] = get<std::vector<double>>(j, "mean_real");
    m.var[0] = get<std::vector<double>>(j, "var_fake");
    m.var[1] = get<std::vector<double>>(j, "var_real");
    if (m.mean[0].size() != m.mean[1].size() || m.var[0].size() != m.mean[0].size() ||
        m.var[1].size() != m.mean[0].size() || (!m.present[0] && !m.present[1])) {
        throw ValidationError("malformed naive bayes");
    }
    return m;
}

// ---------------------------------------------------------------- logistic

double logistic_objective(const Matrix& X, std::span<const Label> y,
                          std::span<const double> theta, double l2) {
    const std::size_t d = X.cols();
    const double n = static_cast<double>(X.rows());
    double loss = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double z = theta[d];
        const auto row = X.row(r);
        for (std::size_t k = 0; k < d; ++k) z += theta[k] * row[k];
        // log(1 + e^z) - y z, computed stably.
        const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - (fake(y[r]) ? z : 0.0);
    }
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) sq += theta[k] * theta[k];
    return loss / n + 0.5 * l2 * sq / n;
}

std::vector<double> logistic_gradient(const Matrix& X, std::span<const Label> y,
                                      std::span<const double> theta, double l2) {
    const std::size_t d = X.cols();
    const double n = static_cast<double>(X.rows());
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t r = 0; r < X.rows(); ++r) {
        double z = theta[d];
        const auto row = X.row(r);
        for (std::size_t k = 0; k < d; ++k) z += theta[k] * row[k];
        const double err = sigmoid(z) - (fake(y[r]) ? 1.0 : 0.0);
        for (std::size_t k = 0; k < d; ++k) g[k] += err * row[k];
        g[d] += err;
    }
    for (std::size_t k = 0; k < d; ++k) g[k] = g[k] / n + l2 * theta[k] / n;
    g[d] /= n;
    return g;
}

LogisticRegression LogisticRegression::fit(const Matrix& X, std::span<const Label> y,
                                           const LogisticOptions& opts) {
    require_aligned(X, y);
    if (opts.l2 < 0.0) throw ValidationError("lr_l2 must be non-negative");
    if (opts.max_iters < 1 || !(opts.tolerance > 0.0)) {
        throw ValidationError("lr_max_iters and lr_tolerance must be positive");
    }
    LogisticRegression m;
    const std::size_t d = X.cols();
    m.weights.assign(d, 0.0);
    const auto fakes = static_cast<std::size_t>(std::count(y.begin(), y.end(), Label::Fake));
    if (fakes == 0 || fakes == y.size()) {
        m.constant = fakes == 0 ? 0.0 : 1.0;
        m.converged = true;
        return m;
    }

    std::vector<double> theta(d + 1, 0.0);
    std::vector<double> trial(d + 1);
    double f = logistic_objective(X, y, theta, opts.l2);
    double step = 1.0;
    constexpr double armijo = 1e-4;
    for (m.iterations = 0; m.iterations < opts.max_iters; ++m.iterations) {
        const auto g = logistic_gradient(X, y, theta, opts.l2);
        double gmax = 0.0, gsq = 0.0;
        for (double v : g) {
            gmax = std::max(gmax, std::abs(v));
            gsq += v * v;
        }
        m.gradient_max_norm = gmax;
        if (gmax < opts.tolerance) {
            m.converged = true;
            break;
        }
        step = std::min(step * 2.0, 1e6);
        double f_trial = 0.0;
        while (true) {
            for (std::size_t k = 0; k <= d; ++k) trial[k] = theta[k] - step * g[k];
            f_trial = logistic_objective(X, y, trial, opts.l2);
            if (f_trial <= f - armijo * step * gsq || step < 1e-16) break;
            step *= 0.5;
        }
        if (step < 1e-16) break;  // no descent possible at double precision
        theta.swap(trial);
        f = f_trial;
    }
    if (!m.converged) {
        const auto g = logistic_gradient(X, y, theta, opts.l2);
        m.gradient_max_norm = 0.0;
        for (double v : g) m.gradient_max_norm = std::max(m.gradient_max_norm, std::abs(v));
        m.converged = m.gradient_max_norm < opts.tolerance;
    }
    std::copy(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d), m.weights.begin());
    m.intercept = theta[d];
    return m;
}

double LogisticRegression::p_fake(std::span<const double> row) const {
    if (constant) return *constant;
    double z = intercept;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * row[k];
    return sigmoid(z);
}

nlohmann::json LogisticRegression::to_json() const {
    return {{"weights", weights},
            {"intercept", intercept},
            {"iterations", iterations},
            {"converged", converged},
            {"gradient_max_norm", gradient_max_norm},
            {"constant", constant ? nlohmann::json(*constant) : nlohmann::json(nullptr)}};
}

LogisticRegression LogisticRegression::from_json(const nlohmann::json& j) {
    LogisticRegression m;
    m.weights = get<std::vector<double>>(j, "weights");
    m.intercept = get<double>(j, "intercept");
    m.iterations = get<int>(j, "iterations");
    m.converged = get<bool>(j, "converged");
    m.gradient_max_norm = get<double>(j, "gradient_max_norm");
    if (j.contains("constant") && !j["constant"].is_null()) m.constant = get<double>(j, "constant");
    return m;
}

}  // namespace misinfo::learners
