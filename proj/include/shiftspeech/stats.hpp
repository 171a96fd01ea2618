#pragma once

// Rank statistics: mid-ranks, Spearman correlation and the Mann-Whitney U test.

#include <span>
#include <string>
#include <vector>

namespace shiftspeech::stats {

/// 1-based ranks; tied values share the mean of the ranks they occupy.
std::vector<double> midranks(std::span<const double> values);

/// Sum over tie groups of (t^3 - t).
double tie_term(std::span<const double> values);

double mean(std::span<const double> values);
double median(std::span<const double> values);  // average of the two middle values for even sizes

/// Pearson correlation of mid-ranks. Throws LengthMismatch, ConstantInput
/// (either vector constant) or EmptyInput (fewer than two pairs).
double spearman_rho(std::span<const double> x, std::span<const double> y);

enum class MwuMethod { Exact, NormalApprox };

struct GroupSummary {
    double median = 0;
    double mean = 0;
    std::size_t n = 0;
};

struct MwuResult {
    double u_statistic = 0;  // from the first sample's side
    double p_value = 1;      // two-sided
    MwuMethod method = MwuMethod::NormalApprox;
    GroupSummary a;
    GroupSummary b;
};

/// Largest pooled size at which untied samples use exact enumeration.
inline constexpr std::size_t kExactMaxPooled = 12;

/// Two-sided test. Exact enumeration when n1+n2 <= 12 and there are no ties,
/// otherwise normal approximation with tie-corrected variance and a 0.5
/// continuity correction. Throws EmptyInput if either sample is empty.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Same statistic with a forced method. Exact enumerates every assignment of
/// the pooled mid-ranks to the two groups (n1+n2 <= 24).
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MwuMethod method);

/// Two-sided normal-approximation p for a given U.
double mwu_normal_p(std::size_t n1, std::size_t n2, double u, double ties = 0.0);

std::string_view to_string(MwuMethod m);

}  // namespace shiftspeech::stats
