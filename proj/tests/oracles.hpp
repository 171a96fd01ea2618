#pragma once

// Brute-force reference implementations used only by the tests. They favour
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

/// (start, duration) of every run of occupied minutes in [0, 720).
inline std::vector<std::pair<int, int>> sessions(const std::vector<int>& minutes) {
    std::array<bool, 720> used{};
    for (int m : minutes) used[static_cast<std::size_t>(m)] = true;
    std::vector<std::pair<int, int>> out;
    int m = 0;
    while (m < 720) {
        if (!used[static_cast<std::size_t>(m)]) {
            ++m;
            continue;
        }
        int start = m;
        while (m < 720 && used[static_cast<std::size_t>(m)]) ++m;
        out.emplace_back(start, m - start);
    }
    return out;
}

/// Mid-rank position of x in the pool, mapped to [-1, 1].
inline double percentile(double x, const std::vector<double>& pool) {
    double below = 0, equal = 0;
    for (double v : pool) {
        if (v < x) below += 1;
        if (v == x) equal += 1;
    }
    double e = (below + 0.5 * equal) / static_cast<double>(pool.size());
    return 2 * e - 1;
}

/// U counted pair by pair: a beats b scores 1, a tie scores 1/2.
inline double u_pairs(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
    return u;
}

/// Two-sided exact p: every split of the pooled values into groups of the
/// original sizes is equally likely under the null.
inline double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size(), k = a.size();
    const double observed = u_pairs(a, b);
    double total = 0, le = 0, ge = 0;
    std::vector<std::size_t> pick;
    std::function<void(std::size_t)> walk = [&](std::size_t from) {
        if (pick.size() == k) {
            std::vector<double> ga, gb;
            std::vector<bool> in(n, false);
            for (auto i : pick) in[i] = true;
            for (std::size_t i = 0; i < n; ++i) (in[i] ? ga : gb).push_back(pooled[i]);
            double u = u_pairs(ga, gb);
            total += 1;
            if (u <= observed + 1e-9) le += 1;
            if (u >= observed - 1e-9) ge += 1;
            return;
        }
        for (std::size_t i = from; i < n; ++i) {
            pick.push_back(i);
            walk(i + 1);
            pick.pop_back();
        }
    };
    walk(0);
    return std::min(1.0, 2 * std::min(le, ge) / total);
}

/// Normal approximation with tie-corrected variance and continuity correction.
inline double mwu_normal_p(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double ties = 0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
        double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size()), n = n1 + n2;
    const double var = n1 * n2 / 12 * ((n + 1) - ties / (n * (n - 1)));
    if (var <= 0) return 1.0;
    const double dev = std::abs(u_pairs(a, b) - n1 * n2 / 2);
    const double z = std::max(0.0, dev - 0.5) / std::sqrt(var);
    return std::min(1.0, 2 * 0.5 * std::erfc(z / std::sqrt(2.0)));
}

/// Spearman from the textbook definition: Pearson correlation of average ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0, eq = 0;
            for (double w : v) {
                if (w < v[i]) less += 1;
                if (w == v[i]) eq += 1;
            }
            r[i] = less + (eq + 1) / 2;
        }
        return r;
    };
    auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n, my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

/// Accuracy-equivalent micro-F1 for binary labels, from the confusion matrix.
inline double micro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    double correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
    return correct / static_cast<double>(pred.size());
}

}  // namespace oracle
