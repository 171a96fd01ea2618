#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shiftspeech/aggregate.hpp"
#include "shiftspeech/stats.hpp"

namespace shiftspeech {

inline constexpr double kDefaultAlpha = 0.05;

enum class GroupFactor { Shift, Unit };

/// Two-level factor over the rows of a feature table.
struct GroupAssignment {
    std::array<std::string, 2> level_names;  // group a, group b
    std::vector<int> group;                  // per row: 0 = a, 1 = b, -1 = excluded
};

/// shift: a = day, b = night. unit: a = icu, b = non_icu, optionally restricted
/// to one shift type.
GroupAssignment assign_groups(const FeatureTable& table, GroupFactor factor,
                              std::optional<ShiftType> within = std::nullopt);

struct ComparisonRow {
    std::string feature;
    stats::MwuResult result;
    bool significant = false;

    friend bool operator==(const ComparisonRow& a, const ComparisonRow& b) {
        return a.feature == b.feature && a.result.u_statistic == b.result.u_statistic &&
               a.result.p_value == b.result.p_value && a.significant == b.significant;
    }
};

/// One two-sided Mann-Whitney test per feature (no multiplicity correction).
/// NaN cells are excluded per feature. Throws EmptyGroup.
std::vector<ComparisonRow> compare_groups(const FeatureTable& table, const GroupAssignment& assignment,
                                          std::span<const std::string> features, double alpha = kDefaultAlpha);

void write_comparisons_csv(const std::filesystem::path& path, std::span<const ComparisonRow> rows);
std::vector<ComparisonRow> read_comparisons_csv(const std::filesystem::path& path);

}  // namespace shiftspeech
