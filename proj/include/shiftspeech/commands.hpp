#pragma once

// Subcommand bodies behind the command-line tool. Each returns a process exit
// code and reports problems on stderr.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shiftspeech/forest.hpp"
#include "shiftspeech/pipeline.hpp"

namespace shiftspeech {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kEmptyCohort = 3;
inline constexpr int kEmptyGroup = 4;
inline constexpr int kDegenerateLabel = 5;
}  // namespace exit_code

/// Bad flags or missing inputs; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Progress lines go to `out` (stdout by default, nullptr silences them).
/// Errors always go to stderr.
void set_command_output(std::FILE* out);

struct SimulateOptions {
    std::optional<std::filesystem::path> spec;  // defaults when absent
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;          // overrides the spec's seed
};
int cmd_simulate(const SimulateOptions& opt);

struct ExtractOptions {
    std::filesystem::path in_dir;
    std::filesystem::path out_dir;
    ExtractionConfig config;
    bool timelines = false;
};
int cmd_extract(const ExtractOptions& opt);

struct CompareOptions {
    std::filesystem::path features;
    std::filesystem::path out_dir;
    std::string factor = "shift";  // shift | unit
    std::string within;            // "", shift (both strata), day, night
    double alpha = 0.05;
};
int cmd_compare(const CompareOptions& opt);

struct PredictOptions {
    std::filesystem::path features;
    std::filesystem::path out;  // report.json
    std::string label = "neg_affect";
    std::uint64_t seed = 7;
    int folds = 5;
    std::string grid;  // e.g. "n_trees=100,200;max_depth=4,none;min_leaf=1"; empty = default grid
};
int cmd_predict(const PredictOptions& opt);

struct VerifyOptions {
    std::filesystem::path features;
    std::filesystem::path truth;
    std::optional<std::filesystem::path> report;
    std::filesystem::path out;  // verification.json
};
int cmd_verify(const VerifyOptions& opt);

struct ReportOptions {
    std::filesystem::path dir;  // directory holding the outputs of the other subcommands
    std::filesystem::path out;  // summary.md
};
int cmd_report(const ReportOptions& opt);

/// Parses a grid override. Throws UsageError.
std::vector<ForestParams> parse_grid(std::string_view text);

}  // namespace shiftspeech
