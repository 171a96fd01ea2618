#include "shiftspeech/compare.hpp"

#include <cmath>

#include "shiftspeech/csv.hpp"

namespace shiftspeech {

GroupAssignment assign_groups(const FeatureTable& table, GroupFactor factor, std::optional<ShiftType> within) {
    GroupAssignment ga;
    ga.group.resize(table.size(), -1);
    if (factor == GroupFactor::Shift) {
        ga.level_names = {"day", "night"};
        for (std::size_t i = 0; i < table.size(); ++i) ga.group[i] = table.shift_types[i] == ShiftType::Day ? 0 : 1;
    } else {
        ga.level_names = {"icu", "non_icu"};
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (within && table.shift_types[i] != *within) continue;
            ga.group[i] = table.unit_types[i] == UnitType::ICU ? 0 : 1;
        }
    }
    return ga;
}

std::vector<ComparisonRow> compare_groups(const FeatureTable& table, const GroupAssignment& assignment,
                                          std::span<const std::string> features, double alpha) {
    std::vector<ComparisonRow> out;
    for (const auto& name : features) {
        auto j = table.column_index(name);
        if (!j) throw Error("unknown feature '" + name + "'");
        std::vector<double> a, b;
        for (std::size_t i = 0; i < table.size(); ++i) {
            double v = table.rows[i][*j];
            if (std::isnan(v)) continue;
            if (assignment.group[i] == 0) a.push_back(v);
            if (assignment.group[i] == 1) b.push_back(v);
        }
        if (a.empty() || b.empty()) throw EmptyGroup("empty group for feature '" + name + "'");
        ComparisonRow row;
        row.feature = name;
        row.result = stats::mann_whitney_u(a, b);
        row.significant = row.result.p_value < alpha;
        out.push_back(std::move(row));
    }
    return out;
}

namespace {
const std::vector<std::string> kComparisonHeader{"feature",      "group_a_median", "group_a_mean",
                                                 "group_b_median", "group_b_mean", "u",
                                                 "p",            "method",         "significant"};
}

void write_comparisons_csv(const std::filesystem::path& path, std::span<const ComparisonRow> rows) {
    csv::Writer w(path);
    w.header(kComparisonHeader);
    for (const auto& r : rows)
        w.row({r.feature, csv::format_double(r.result.a.median), csv::format_double(r.result.a.mean),
               csv::format_double(r.result.b.median), csv::format_double(r.result.b.mean),
               csv::format_double(r.result.u_statistic), csv::format_double(r.result.p_value),
               std::string(stats::to_string(r.result.method)), r.significant ? "1" : "0"});
}

std::vector<ComparisonRow> read_comparisons_csv(const std::filesystem::path& path) {
    std::vector<ComparisonRow> out;
    csv::read_file(path, kComparisonHeader, [&](const csv::Row& r) {
        try {
            ComparisonRow row;
            row.feature = std::string(r.fields[0]);
            row.result.a.median = csv::parse_double(r.fields[1]);
            row.result.a.mean = csv::parse_double(r.fields[2]);
            row.result.b.median = csv::parse_double(r.fields[3]);
            row.result.b.mean = csv::parse_double(r.fields[4]);
            row.result.u_statistic = csv::parse_double(r.fields[5]);
            row.result.p_value = csv::parse_double(r.fields[6]);
            if (r.fields[7] == "exact")
                row.result.method = stats::MwuMethod::Exact;
            else if (r.fields[7] == "normal")
                row.result.method = stats::MwuMethod::NormalApprox;
            else
                throw Error("unknown method");
            if (r.fields[8] != "0" && r.fields[8] != "1") throw Error("significant must be 0 or 1");
            row.significant = r.fields[8] == "1";
            if (!(row.result.p_value >= 0 && row.result.p_value <= 1)) throw Error("p outside [0,1]");
            if (row.result.u_statistic < 0) throw Error("negative U");
            out.push_back(std::move(row));
        } catch (const std::exception& e) {
            throw MalformedRow(path.filename().string(), r.line, e.what());
        }
    });
    return out;
}

}  // namespace shiftspeech
