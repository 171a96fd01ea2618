#pragma once

// CART classification trees (Gini) grown on bootstrap samples.
//
// Tree t is seeded with splitmix64(master_seed + (t + 1) * 0x9E3779B97F4A7C15),
// so a forest is identical whether its trees are grown serially or in parallel.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace shiftspeech {

/// Row-major sample matrix.
using Matrix = std::vector<std::vector<double>>;

struct ForestParams {
    int n_trees = 100;
    int max_depth = -1;          // -1 = unlimited
    int min_leaf = 1;
    int features_per_split = 0;  // 0 = ceil(sqrt(d))
    bool bootstrap = true;

    friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::array<int, 2> counts{};  // bootstrap class counts reaching the node

    bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree {
public:
    /// Probability of class 1 at the reached leaf.
    double predict_proba(std::span<const double> row) const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

private:
    friend class TreeBuilder;
    std::vector<TreeNode> nodes_;
};

class ForestModel {
public:
    int predict(std::span<const double> row) const;  // 1 iff mean probability > 0.5
    std::vector<int> predict(const Matrix& x) const;
    double predict_proba(std::span<const double> row) const;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const ForestParams& params() const noexcept { return params_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Mean impurity decrease per feature, normalised to sum to 1
    /// (uniform when no tree split at all).
    const std::vector<double>& importances() const noexcept { return importances_; }

private:
    friend ForestModel train_forest_impl(const Matrix&, std::span<const int>, const ForestParams&, std::uint64_t,
                                         bool);
    std::vector<DecisionTree> trees_;
    ForestParams params_;
    std::uint64_t seed_ = 0;
    std::vector<double> importances_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t tree_index) noexcept;

/// Trees are grown in an OpenMP loop. Throws SingleClassInput, EmptyInput.
ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestParams& params, std::uint64_t seed);

/// Reference: grows trees one after another; bit-identical to train_forest.
ForestModel train_forest_serial(const Matrix& x, std::span<const int> y, const ForestParams& params,
                                std::uint64_t seed);

}  // namespace shiftspeech
