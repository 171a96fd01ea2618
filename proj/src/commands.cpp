#include "shiftspeech/commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>

#include <fmt/format.h>
#include <json.hpp>

#include "shiftspeech/compare.hpp"
#include "shiftspeech/predict.hpp"
#include "shiftspeech/simgen.hpp"

namespace shiftspeech {

namespace {

std::FILE* g_info = stdout;

template <class... Args>
void say(fmt::format_string<Args...> f, Args&&... args) {
    if (g_info) fmt::print(g_info, f, std::forward<Args>(args)...);
}

int guarded(const char* name, const std::function<void()>& body) {
    try {
        body();
        return exit_code::kOk;
    } catch (const UsageError& e) {
        fmt::print(stderr, "{}: {}\n", name, e.what());
        return exit_code::kUsage;
    } catch (const InvalidSpec& e) {
        fmt::print(stderr, "{}: invalid spec: {}\n", name, e.what());
        return exit_code::kUsage;
    } catch (const EmptyCohort& e) {
        fmt::print(stderr, "{}: empty cohort: {}\n", name, e.what());
        return exit_code::kEmptyCohort;
    } catch (const EmptyGroup& e) {
        fmt::print(stderr, "{}: empty group: {}\n", name, e.what());
        return exit_code::kEmptyGroup;
    } catch (const DegenerateLabel& e) {
        fmt::print(stderr, "{}: degenerate label: {}\n", name, e.what());
        return exit_code::kDegenerateLabel;
    } catch (const std::exception& e) {
        fmt::print(stderr, "{}: {}\n", name, e.what());
        return exit_code::kFailure;
    }
}

void require_file(const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::is_regular_file(p)) throw UsageError(fmt::format("{} not found: {}", what, p.string()));
}

}  // namespace

void set_command_output(std::FILE* out) { g_info = out; }

int cmd_simulate(const SimulateOptions& opt) {
    return guarded("simulate", [&] {
        CohortSpec spec;
        if (opt.spec) {
            require_file(*opt.spec, "spec file");
            spec = parse_cohort_spec(*opt.spec);
        }
        if (opt.seed) spec.seed = *opt.seed;
        auto truth = generate(spec, opt.out_dir);
        say("simulate: {} participants, {} shifts each, seed {} -> {}\n", truth.participants.size(),
                   spec.n_shifts, spec.seed, opt.out_dir.string());
    });
}

int cmd_extract(const ExtractOptions& opt) {
    return guarded("extract", [&] {
        if (!std::filesystem::is_directory(opt.in_dir)) throw UsageError("input directory not found: " + opt.in_dir.string());
        if (opt.config.min_days < 1) throw UsageError("--min-days must be >= 1");
        if (opt.config.min_frames < 1) throw UsageError("--min-frames must be >= 1");
        Cohort cohort = parse_cohort(opt.in_dir);
        auto result = extract_cohort(cohort, opt.config);
        write_extraction(opt.out_dir, result, opt.timelines);
        say("extract: {} participants kept, {} removed by min-days; {} recordings and {} rssi rows outside "
                   "the shift window; {} rssi values clamped\n",
                   result.participants.size(), result.removed_participants, result.dropped_recordings,
                   result.dropped_rssi, cohort.report.rssi_clamped);
    });
}

int cmd_compare(const CompareOptions& opt) {
    return guarded("compare", [&] {
        require_file(opt.features, "features file");
        if (!(opt.alpha > 0 && opt.alpha < 1)) throw UsageError("--alpha must be in (0, 1)");
        GroupFactor factor;
        if (opt.factor == "shift")
            factor = GroupFactor::Shift;
        else if (opt.factor == "unit")
            factor = GroupFactor::Unit;
        else
            throw UsageError("--factor must be shift or unit");

        std::vector<std::pair<std::string, std::optional<ShiftType>>> strata;
        if (opt.within.empty())
            strata.push_back({"comparisons.csv", std::nullopt});
        else if (opt.within == "shift")
            strata = {{"comparisons_day.csv", ShiftType::Day}, {"comparisons_night.csv", ShiftType::Night}};
        else if (opt.within == "day" || opt.within == "night")
            strata.push_back({"comparisons_" + opt.within + ".csv", parse_shift_type(opt.within)});
        else
            throw UsageError("--within must be shift, day or night");
        if (!opt.within.empty() && factor == GroupFactor::Shift)
            throw UsageError("--within only applies to --factor unit");

        FeatureTable table = read_features_csv(opt.features);
        std::filesystem::create_directories(opt.out_dir);
        for (const auto& [file, within] : strata) {
            auto groups = assign_groups(table, factor, within);
            auto rows = compare_groups(table, groups, table.columns, opt.alpha);
            write_comparisons_csv(opt.out_dir / file, rows);
            auto n_sig = std::count_if(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.significant; });
            say("compare: {} vs {}{}: {} of {} features at p < {} -> {}\n", groups.level_names[0],
                       groups.level_names[1], within ? fmt::format(" ({} shift)", to_string(*within)) : "", n_sig,
                       rows.size(), opt.alpha, (opt.out_dir / file).string());
        }
        say("compare: note: p-values are not corrected for multiple comparisons\n");
    });
}

std::vector<ForestParams> parse_grid(std::string_view text) {
    std::vector<int> trees{100, 200, 400}, depths{4, 8, -1}, leaves{1, 2, 5};
    auto parse_list = [](std::string_view key, std::string_view list, bool allow_none) {
        std::vector<int> out;
        while (!list.empty()) {
            auto comma = list.find(',');
            std::string_view item = list.substr(0, comma);
            list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
            if (allow_none && item == "none") {
                out.push_back(-1);
                continue;
            }
            int v = 0;
            auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (ec != std::errc{} || ptr != item.data() + item.size() || v < (allow_none ? 0 : 1))
                throw UsageError(fmt::format("grid: bad value '{}' for {}", item, key));
            out.push_back(v);
        }
        if (out.empty()) throw UsageError(fmt::format("grid: empty list for {}", key));
        return out;
    };
    while (!text.empty()) {
        auto semi = text.find(';');
        std::string_view part = text.substr(0, semi);
        text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
        auto eq = part.find('=');
        if (eq == std::string_view::npos) throw UsageError(fmt::format("grid: expected key=values in '{}'", part));
        std::string_view key = part.substr(0, eq), values = part.substr(eq + 1);
        if (key == "n_trees")
            trees = parse_list(key, values, false);
        else if (key == "max_depth")
            depths = parse_list(key, values, true);
        else if (key == "min_leaf")
            leaves = parse_list(key, values, false);
        else
            throw UsageError(fmt::format("grid: unknown key '{}'", key));
    }
    std::vector<ForestParams> grid;
    for (int t : trees)
        for (int d : depths)
            for (int l : leaves) grid.push_back({t, d, l, 0, true});
    return grid;
}

int cmd_predict(const PredictOptions& opt) {
    return guarded("predict", [&] {
        require_file(opt.features, "features file");
        if (std::find(kLabelNames.begin(), kLabelNames.end(), opt.label) == kLabelNames.end())
            throw UsageError("--label must be pos_affect, neg_affect or life_satisfaction");
        if (opt.folds < 2) throw UsageError("--folds must be >= 2");
        auto grid = opt.grid.empty() ? default_grid() : parse_grid(opt.grid);
        FeatureTable table = read_features_csv(opt.features);
        auto y = binarize_label(table.label(opt.label));
        auto report = cross_validate(table.rows, y, table.columns, grid, opt.folds, opt.seed, opt.label);
        if (opt.out.has_parent_path()) std::filesystem::create_directories(opt.out.parent_path());
        write_report_json(opt.out, report);
        const auto& best = report.best().params;
        say("predict: {} (n={}), best n_trees={} max_depth={} min_leaf={}, cv micro-F1 {:.4f}\n", opt.label,
                   table.size(), best.n_trees, best.max_depth < 0 ? std::string("none") : std::to_string(best.max_depth),
                   best.min_leaf, report.best().micro_f1);
        for (std::size_t k = 0; k < std::min<std::size_t>(10, report.importances.size()); ++k)
            say("  {:2d}. {:<28} {:.4f}\n", k + 1, report.importances[k].feature, report.importances[k].weight);
    });
}

int cmd_verify(const VerifyOptions& opt) {
    return guarded("verify", [&] {
        require_file(opt.features, "features file");
        require_file(opt.truth, "ground truth file");
        FeatureTable table = read_features_csv(opt.features);
        GroundTruth truth = read_ground_truth(opt.truth);
        std::optional<ReportSummary> summary;
        if (opt.report) {
            require_file(*opt.report, "report file");
            summary = read_report_json(*opt.report);
        }
        auto v = verify_against_truth(table, truth, summary ? &*summary : nullptr);
        if (opt.out.has_parent_path()) std::filesystem::create_directories(opt.out.parent_path());
        write_verification_json(opt.out, v);
        for (const auto& r : v.recovery)
            say("verify: {:<34} {:<9} planted {:<8.4g} recovered {:<8.4g} rel.err {:.3f}\n", r.quantity, r.group,
                       r.planted, r.recovered, r.relative_error);
        auto summarize = [](const char* name, const std::vector<FlagCheck>& flags) {
            std::size_t planted = 0, hit = 0, false_hits = 0, null = 0;
            for (const auto& f : flags) {
                if (f.planted) {
                    ++planted;
                    hit += f.flagged;
                } else {
                    ++null;
                    false_hits += f.flagged;
                }
            }
            say("verify: {} factor: {}/{} planted features flagged, {}/{} others flagged\n", name, hit, planted,
                       false_hits, null);
        };
        summarize("shift", v.shift_flags);
        summarize("unit", v.unit_flags);
        if (!v.label.empty())
            say("verify: {}: planted features in top-10: [{}], missing: [{}]\n", v.label,
                       fmt::join(v.planted_in_top, ", "), fmt::join(v.planted_missing, ", "));
    });
}

int cmd_report(const ReportOptions& opt) {
    return guarded("report", [&] {
        if (!std::filesystem::is_directory(opt.dir)) throw UsageError("directory not found: " + opt.dir.string());
        std::vector<std::filesystem::path> entries;
        for (const auto& e : std::filesystem::directory_iterator(opt.dir))
            if (e.is_regular_file()) entries.push_back(e.path());
        std::sort(entries.begin(), entries.end());

        std::string md = "# Run summary\n";
        const auto features = opt.dir / "features.csv";
        if (std::filesystem::is_regular_file(features)) {
            FeatureTable t = read_features_csv(features);
            std::size_t day = std::count(t.shift_types.begin(), t.shift_types.end(), ShiftType::Day);
            std::size_t icu = std::count(t.unit_types.begin(), t.unit_types.end(), UnitType::ICU);
            md += fmt::format("\n## Cohort\n\n{} participants ({} day, {} night; {} icu, {} non_icu), {} features.\n",
                              t.size(), day, t.size() - day, icu, t.size() - icu, t.columns.size());
        }
        for (const auto& p : entries) {
            const std::string name = p.filename().string();
            if (name.starts_with("comparisons") && p.extension() == ".csv") {
                auto rows = read_comparisons_csv(p);
                md += fmt::format("\n## {}\n\n| feature | median a | median b | U | p | method |\n|---|---|---|---|---|---|\n",
                                  name);
                for (const auto& r : rows)
                    if (r.significant)
                        md += fmt::format("| {} | {:.4g} | {:.4g} | {} | {:.4g} | {} |\n", r.feature, r.result.a.median,
                                          r.result.b.median, r.result.u_statistic, r.result.p_value,
                                          stats::to_string(r.result.method));
                md += "\nOnly rows with p below alpha are listed; no multiple-comparison correction.\n";
            } else if (name.starts_with("report") && p.extension() == ".json") {
                auto r = read_report_json(p);
                md += fmt::format("\n## {} ({})\n\nCV micro-F1 {:.4f} with n_trees={}, max_depth={}, min_leaf={}.\n\n",
                                  name, r.label, r.cv_micro_f1, r.best_config.n_trees,
                                  r.best_config.max_depth < 0 ? std::string("none") : std::to_string(r.best_config.max_depth),
                                  r.best_config.min_leaf);
                for (std::size_t k = 0; k < r.importances.size(); ++k)
                    md += fmt::format("{}. {} ({:.4f})\n", k + 1, r.importances[k].feature, r.importances[k].weight);
            } else if (name == "verification.json") {
                std::ifstream in(p);
                auto j = nlohmann::json::parse(in);
                md += "\n## Recovery of planted quantities\n\n| quantity | group | planted | recovered | rel. error |\n"
                      "|---|---|---|---|---|\n";
                for (const auto& r : j.at("recovery"))
                    md += fmt::format("| {} | {} | {:.4g} | {:.4g} | {:.3f} |\n", r.at("quantity").get<std::string>(),
                                      r.at("group").get<std::string>(), r.at("planted").get<double>(),
                                      r.at("recovered").get<double>(), r.at("relative_error").get<double>());
            }
        }
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw Error("cannot write " + opt.out.string());
        out << md;
        say("report: wrote {}\n", opt.out.string());
    });
}

}  // namespace shiftspeech
