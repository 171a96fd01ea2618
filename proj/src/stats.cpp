#include "shiftspeech/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "shiftspeech/common.hpp"

namespace shiftspeech::stats {

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double acc = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        auto t = static_cast<double>(j - i);
        acc += t * t * t - t;
        i = j;
    }
    return acc;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("mean of empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
    if (values.empty()) throw EmptyInput("median of empty sample");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman_rho: length mismatch");
    if (x.size() < 2) throw EmptyInput("spearman_rho: need at least two pairs");
    auto rx = midranks(x);
    auto ry = midranks(y);
    double mx = mean(rx), my = mean(ry);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) throw ConstantInput("spearman_rho: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

GroupSummary summarize(std::span<const double> v) { return {median(v), mean(v), v.size()}; }

// Exact two-sided p: enumerate every way of choosing n1 of the pooled ranks.
double exact_p(std::span<const double> pooled_ranks, std::size_t n1, double u_obs) {
    const std::size_t n = pooled_ranks.size();
    const double offset = static_cast<double>(n1 * (n1 + 1)) / 2.0;
    std::uint64_t total = 0, le = 0, ge = 0;
    const std::uint32_t limit = 1u << n;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != n1) continue;
        double rank_sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) rank_sum += pooled_ranks[i];
        double u = rank_sum - offset;
        ++total;
        // Rank sums are multiples of 0.5, so this tolerance only absorbs rounding.
        if (u <= u_obs + 1e-9) ++le;
        if (u >= u_obs - 1e-9) ++ge;
    }
    double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, 2.0 * tail);
}

}  // namespace

double mwu_normal_p(std::size_t n1, std::size_t n2, double u, double ties) {
    const double a = static_cast<double>(n1), b = static_cast<double>(n2), n = a + b;
    const double mu = a * b / 2.0;
    double var = a * b / 12.0 * ((n + 1.0) - (n > 1 ? ties / (n * (n - 1.0)) : 0.0));
    if (var <= 0) return 1.0;
    double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MwuMethod method) {
    if (a.empty() || b.empty()) throw EmptyInput("mann_whitney_u: empty sample");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = midranks(pooled);
    const std::size_t n1 = a.size(), n2 = b.size();

    double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0.0);
    MwuResult res;
    res.u_statistic = rank_sum_a - static_cast<double>(n1 * (n1 + 1)) / 2.0;
    res.method = method;
    res.a = summarize(a);
    res.b = summarize(b);
    if (method == MwuMethod::Exact) {
        if (n1 + n2 > 24) throw Error("exact Mann-Whitney limited to 24 pooled samples");
        res.p_value = exact_p(ranks, n1, res.u_statistic);
    } else {
        res.p_value = mwu_normal_p(n1, n2, res.u_statistic, tie_term(pooled));
    }
    return res;
}

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    bool untied = tie_term(pooled) == 0.0;
    bool exact = untied && pooled.size() <= kExactMaxPooled;
    return mann_whitney_u(a, b, exact ? MwuMethod::Exact : MwuMethod::NormalApprox);
}

std::string_view to_string(MwuMethod m) { return m == MwuMethod::Exact ? "exact" : "normal"; }

}  // namespace shiftspeech::stats
