#pragma once

// Self-report prediction: median-binarised labels, z-normalisation fit on
// training folds, stratified k-fold grid search scored by micro-F1.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shiftspeech/forest.hpp"

namespace shiftspeech {

/// 1 iff value > median. Throws DegenerateLabel when all values are equal or
/// the split leaves one class empty; EmptyInput for fewer than two values.
std::vector<int> binarize_label(std::span<const double> values);

struct NormalizationParams {
    std::vector<double> mean;
    std::vector<double> std;       // population std
    std::vector<bool> constant;    // zero-variance columns map to 0

    Matrix apply(const Matrix& x) const;
};

/// Column-wise z-score. Throws TooFewSamples for fewer than two rows.
std::pair<Matrix, NormalizationParams> znormalize(const Matrix& x);

/// Micro-averaged F1 from TP/FP/FN pooled over both classes. Throws LengthMismatch, EmptyInput.
double micro_f1(std::span<const int> pred, std::span<const int> truth);

struct Dataset {
    Matrix x;  // z-normalised
    std::vector<int> y;
    std::vector<std::string> columns;
    NormalizationParams params;
};

Dataset make_dataset(const Matrix& raw, std::span<const int> y, std::vector<std::string> columns);

/// n_trees {100,200,400} x max_depth {4,8,unlimited} x min_leaf {1,2,5}.
std::vector<ForestParams> default_grid();

/// Per-class shuffled round-robin fold assignment. Throws TooFewSamples when
/// a class has fewer than k members.
std::vector<int> stratified_folds(std::span<const int> y, int k, std::uint64_t seed);

struct ConfigScore {
    ForestParams params;
    double micro_f1 = 0;            // mean over folds
    std::vector<double> fold_f1;
};

struct FeatureWeight {
    std::string feature;
    double weight = 0;
};

struct CvReport {
    std::string label;
    std::vector<ConfigScore> grid;
    std::size_t best_index = 0;
    std::vector<FeatureWeight> importances;  // final fit on all rows, sorted by weight descending
    std::uint64_t seed = 0;
    int folds = 5;

    const ConfigScore& best() const { return grid.at(best_index); }
};

/// Grid search over `grid`; normalisation is fit on the training folds of each
/// split. Importances come from a fit on every row with the best config.
/// Forest seeds: fold f -> splitmix64(seed ^ (f + 1)), final fit -> splitmix64(seed ^ 0).
/// Throws TooFewSamples when n < k.
CvReport cross_validate(const Matrix& raw, std::span<const int> y, const std::vector<std::string>& columns,
                        const std::vector<ForestParams>& grid, int k, std::uint64_t seed, std::string label = {});

/// report.json: {label, best_config, cv_micro_f1, importances (top_n), seed, folds, grid}.
void write_report_json(const std::filesystem::path& path, const CvReport& report, std::size_t top_n = 10);

struct ReportSummary {
    std::string label;
    ForestParams best_config;
    double cv_micro_f1 = 0;
    std::vector<FeatureWeight> importances;
    std::uint64_t seed = 0;
};

/// Parses and validates report.json. Throws MalformedRow.
ReportSummary read_report_json(const std::filesystem::path& path);

}  // namespace shiftspeech
