// Command-line driver: simulate, extract, compare, predict, verify, report.

#include <CLI11.hpp>

#include "shiftspeech/commands.hpp"

using namespace shiftspeech;

int main(int argc, char** argv) {
    CLI::App app{"Speech-activity and arousal analysis for shift-work wearable cohorts"};
    app.require_subcommand(1);

    SimulateOptions sim;
    std::string sim_spec;
    std::uint64_t sim_seed = 0;
    auto* s = app.add_subcommand("simulate", "Generate a synthetic cohort with planted effects");
    s->add_option("--spec", sim_spec, "Flat key = value spec file (defaults when omitted)");
    s->add_option("--out", sim.out_dir, "Output directory")->required();
    auto* seed_opt = s->add_option("--seed", sim_seed, "Override the spec's seed");

    ExtractOptions ext;
    double fg_threshold = kDefaultForegroundThreshold;
    bool external = false;
    auto* e = app.add_subcommand("extract", "Run the extraction pipeline on a cohort directory");
    e->add_option("--in", ext.in_dir, "Cohort directory")->required();
    e->add_option("--out", ext.out_dir, "Output directory")->required();
    e->add_option("--foreground-threshold", fg_threshold, "Foreground probability threshold")
        ->check(CLI::Range(0.0, 1.0));
    e->add_flag("--external-scores", external, "Trust per-frame foreground flags when present");
    e->add_option("--min-frames", ext.config.min_frames, "Foreground frames for a valid recording");
    e->add_option("--min-days", ext.config.min_days, "Distinct recording days to keep a participant");
    e->add_option("--rssi-floor", ext.config.rssi_floor, "Readings below this are ignored")
        ->check(CLI::Range(kRssiMin, kRssiMax));
    e->add_option("--arousal-threshold", ext.config.arousal_threshold, "Fused-score cut for pos/neg arousal")
        ->check(CLI::Range(0.0, 1.8));
    e->add_flag("--timelines", ext.timelines, "Also write timeline.csv");

    CompareOptions cmp;
    auto* c = app.add_subcommand("compare", "Mann-Whitney group comparisons of the feature table");
    c->add_option("--features", cmp.features, "features.csv")->required();
    c->add_option("--out", cmp.out_dir, "Output directory")->required();
    c->add_option("--factor", cmp.factor, "shift | unit");
    c->add_option("--within", cmp.within, "Stratify unit comparisons: shift (both), day or night");
    c->add_option("--alpha", cmp.alpha, "Significance level");

    PredictOptions pred;
    auto* p = app.add_subcommand("predict", "Random-forest prediction of a binarised self-report label");
    p->add_option("--features", pred.features, "features.csv")->required();
    p->add_option("--out", pred.out, "report.json path")->required();
    p->add_option("--label", pred.label, "pos_affect | neg_affect | life_satisfaction");
    p->add_option("--seed", pred.seed, "Seed for folds and forests");
    p->add_option("--folds", pred.folds, "Cross-validation folds");
    p->add_option("--grid", pred.grid, "Override, e.g. \"n_trees=100;max_depth=4,none;min_leaf=1,5\"");

    VerifyOptions ver;
    std::string ver_report;
    auto* v = app.add_subcommand("verify", "Compare extracted features against simulator ground truth");
    v->add_option("--features", ver.features, "features.csv")->required();
    v->add_option("--truth", ver.truth, "ground_truth.json")->required();
    v->add_option("--report", ver_report, "Optional report.json");
    v->add_option("--out", ver.out, "verification.json path")->required();

    ReportOptions rep;
    auto* r = app.add_subcommand("report", "Summarise the outputs of a run directory as markdown");
    r->add_option("--dir", rep.dir, "Directory with features.csv, comparisons*.csv, report*.json")->required();
    r->add_option("--out", rep.out, "summary.md path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? exit_code::kOk : exit_code::kUsage;
    }

    if (s->parsed()) {
        if (!sim_spec.empty()) sim.spec = sim_spec;
        if (seed_opt->count() > 0) sim.seed = sim_seed;
        return cmd_simulate(sim);
    }
    if (e->parsed()) {
        ext.config.filter = external ? ForegroundFilter::external(fg_threshold) : ForegroundFilter::threshold(fg_threshold);
        return cmd_extract(ext);
    }
    if (c->parsed()) return cmd_compare(cmp);
    if (p->parsed()) return cmd_predict(pred);
    if (v->parsed()) {
        if (!ver_report.empty()) ver.report = ver_report;
        return cmd_verify(ver);
    }
    return cmd_report(rep);
}
