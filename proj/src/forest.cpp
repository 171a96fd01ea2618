#include "shiftspeech/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shiftspeech/common.hpp"

namespace shiftspeech {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_index) noexcept {
    return splitmix64(master_seed + (static_cast<std::uint64_t>(tree_index) + 1) * 0x9E3779B97F4A7C15ull);
}

double DecisionTree::predict_proba(std::span<const double> row) const {
    std::size_t k = 0;
    while (!nodes_[k].is_leaf()) {
        const auto& n = nodes_[k];
        k = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    const auto& c = nodes_[k].counts;
    return static_cast<double>(c[1]) / static_cast<double>(c[0] + c[1]);
}

// Grows one tree over column-major data.
class TreeBuilder {
public:
    TreeBuilder(const std::vector<double>& columns, std::size_t n_rows, std::size_t n_features,
                std::span<const int> y, const ForestParams& params, std::uint64_t seed)
        : cols_(columns), n_rows_(n_rows), d_(n_features), y_(y), params_(params), rng_(seed),
          importance_(n_features, 0.0) {
        mtry_ = params.features_per_split > 0
                    ? std::min<std::size_t>(static_cast<std::size_t>(params.features_per_split), d_)
                    : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d_))));
        mtry_ = std::max<std::size_t>(mtry_, 1);
        feature_pool_.resize(d_);
    }

    DecisionTree build() {
        std::vector<std::size_t> sample(n_rows_);
        if (params_.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n_rows_ - 1);
            for (auto& s : sample) s = pick(rng_);
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        root_size_ = static_cast<double>(sample.size());
        grow(sample, 0);
        return std::move(tree_);
    }

    const std::vector<double>& importance() const { return importance_; }

private:
    double value(std::size_t feature, std::size_t row) const { return cols_[feature * n_rows_ + row]; }

    // Sum of child Gini impurities weighted by child size (n * gini).
    static double weighted_gini(double c0, double c1) {
        double n = c0 + c1;
        return n > 0 ? n - (c0 * c0 + c1 * c1) / n : 0.0;
    }

    int grow(std::vector<std::size_t>& idx, int depth) {
        const int node_id = static_cast<int>(tree_.nodes_.size());
        tree_.nodes_.emplace_back();
        std::array<int, 2> counts{};
        for (auto i : idx) ++counts[static_cast<std::size_t>(y_[i])];
        tree_.nodes_[static_cast<std::size_t>(node_id)].counts = counts;

        const auto n = idx.size();
        const auto min_leaf = static_cast<std::size_t>(std::max(1, params_.min_leaf));
        bool depth_ok = params_.max_depth < 0 || depth < params_.max_depth;
        if (!depth_ok || counts[0] == 0 || counts[1] == 0 || n < 2 * min_leaf) return node_id;

        // Uniform subset of features, evaluated in ascending index order.
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
        for (std::size_t k = 0; k < mtry_; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, d_ - 1);
            std::swap(feature_pool_[k], feature_pool_[pick(rng_)]);
        }
        std::vector<std::size_t> candidates(feature_pool_.begin(), feature_pool_.begin() + static_cast<long>(mtry_));
        std::sort(candidates.begin(), candidates.end());

        const double parent = weighted_gini(counts[0], counts[1]);
        double best_child = parent;
        std::size_t best_feature = d_;
        double best_threshold = 0;

        std::vector<std::size_t> order(idx);
        for (std::size_t f : candidates) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(f, a) < value(f, b); });
            double l0 = 0, l1 = 0;
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                (y_[order[pos]] == 0 ? l0 : l1) += 1;
                const std::size_t left_n = pos + 1;
                if (left_n < min_leaf || n - left_n < min_leaf) continue;
                double lo = value(f, order[pos]), hi = value(f, order[pos + 1]);
                if (!(lo < hi)) continue;
                double child = weighted_gini(l0, l1) + weighted_gini(counts[0] - l0, counts[1] - l1);
                if (child < best_child) {  // strict: first (lowest feature, lowest threshold) wins ties
                    best_child = child;
                    best_feature = f;
                    double mid = lo + (hi - lo) / 2;
                    best_threshold = mid < hi ? mid : lo;
                }
            }
        }
        if (best_feature == d_) return node_id;

        importance_[best_feature] += (parent - best_child) / root_size_;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (value(best_feature, i) <= best_threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        int l = grow(left, depth + 1);
        int r = grow(right, depth + 1);
        auto& node = tree_.nodes_[static_cast<std::size_t>(node_id)];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return node_id;
    }

    const std::vector<double>& cols_;
    std::size_t n_rows_;
    std::size_t d_;
    std::span<const int> y_;
    ForestParams params_;
    std::mt19937_64 rng_;
    std::size_t mtry_ = 1;
    std::vector<std::size_t> feature_pool_;
    std::vector<double> importance_;
    double root_size_ = 1;
    DecisionTree tree_;
};

ForestModel train_forest_impl(const Matrix& x, std::span<const int> y, const ForestParams& params,
                              std::uint64_t seed, bool parallel) {
    if (x.empty() || x.size() != y.size()) throw EmptyInput("train_forest: empty or mismatched input");
    const std::size_t n = x.size(), d = x.front().size();
    if (d == 0) throw EmptyInput("train_forest: no features");
    std::array<std::size_t, 2> classes{};
    for (int label : y) {
        if (label != 0 && label != 1) throw Error("train_forest: labels must be 0/1");
        ++classes[static_cast<std::size_t>(label)];
    }
    if (classes[0] == 0 || classes[1] == 0) throw SingleClassInput("train_forest: one class only");
    if (params.n_trees < 1) throw Error("train_forest: n_trees must be >= 1");

    std::vector<double> cols(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i].size() != d) throw Error("train_forest: ragged matrix");
        for (std::size_t j = 0; j < d; ++j) cols[j * n + i] = x[i][j];
    }

    ForestModel model;
    model.params_ = params;
    model.seed_ = seed;
    const auto t_count = static_cast<std::size_t>(params.n_trees);
    model.trees_.resize(t_count);
    std::vector<std::vector<double>> per_tree(t_count);

    auto grow_one = [&](std::size_t t) {
        TreeBuilder b(cols, n, d, y, params, tree_seed(seed, t));
        model.trees_[t] = b.build();
        per_tree[t] = b.importance();
    };
    if (parallel) {
        const auto nt = static_cast<long>(t_count);
#pragma omp parallel for schedule(dynamic)
        for (long t = 0; t < nt; ++t) grow_one(static_cast<std::size_t>(t));
    } else {
        for (std::size_t t = 0; t < t_count; ++t) grow_one(t);
    }

    // Reduce in tree order so the result does not depend on scheduling.
    model.importances_.assign(d, 0.0);
    for (const auto& imp : per_tree)
        for (std::size_t j = 0; j < d; ++j) model.importances_[j] += imp[j];
    double total = std::accumulate(model.importances_.begin(), model.importances_.end(), 0.0);
    for (auto& v : model.importances_) v = total > 0 ? v / total : 1.0 / static_cast<double>(d);
    return model;
}

ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestParams& params, std::uint64_t seed) {
    return train_forest_impl(x, y, params, seed, true);
}

ForestModel train_forest_serial(const Matrix& x, std::span<const int> y, const ForestParams& params,
                                std::uint64_t seed) {
    return train_forest_impl(x, y, params, seed, false);
}

double ForestModel::predict_proba(std::span<const double> row) const {
    double acc = 0;
    for (const auto& t : trees_) acc += t.predict_proba(row);
    return acc / static_cast<double>(trees_.size());
}

int ForestModel::predict(std::span<const double> row) const { return predict_proba(row) > 0.5 ? 1 : 0; }

std::vector<int> ForestModel::predict(const Matrix& x) const {
    std::vector<int> out;
    out.reserve(x.size());
    for (const auto& row : x) out.push_back(predict(row));
    return out;
}

}  // namespace shiftspeech
