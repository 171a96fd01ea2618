#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "shiftspeech/commands.hpp"
#include "shiftspeech/predict.hpp"
#include "shiftspeech/simgen.hpp"

using namespace shiftspeech;

namespace {

int run_binary(const std::string& args) {
    std::string cmd = std::string(SHIFTSPEECH_BIN) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallSpec = "n_per_cell = 1\nn_shifts = 5\nshort_participant_fraction = 0\nframes_per_recording = 40\n";

struct Silence {
    Silence() { set_command_output(nullptr); }
};
const Silence silence;

}  // namespace

TEST_CASE("simulate writes the canonical files and ground truth") {
    fixture::TempDir dir("cli-sim");
    fixture::write_text(dir / "spec.txt", kSmallSpec);
    CHECK(cmd_simulate({dir / "spec.txt", dir / "cohort", 9}) == exit_code::kOk);
    int n = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "cohort")) n += e.is_regular_file();
    CHECK(n == 6);
    CHECK(read_ground_truth(dir / "cohort" / "ground_truth.json").spec.seed == 9);
}

TEST_CASE("missing inputs and bad specs are usage errors") {
    fixture::TempDir dir("cli-usage");
    CHECK(cmd_simulate({dir / "absent.txt", dir / "out", std::nullopt}) == exit_code::kUsage);
    fixture::write_text(dir / "bad.txt", "n_per_cell = -1\n");
    CHECK(cmd_simulate({dir / "bad.txt", dir / "out", std::nullopt}) == exit_code::kUsage);
    CHECK(cmd_extract({dir / "nowhere", dir / "out", {}, false}) == exit_code::kUsage);
    CompareOptions c;
    c.features = dir / "none.csv";
    c.out_dir = dir.path();
    CHECK(cmd_compare(c) == exit_code::kUsage);
    PredictOptions p;
    p.features = dir / "none.csv";
    p.out = dir / "r.json";
    CHECK(cmd_predict(p) == exit_code::kUsage);
    CHECK_THROWS_AS(parse_grid("n_trees=abc"), UsageError);
    CHECK_THROWS_AS(parse_grid("depth=4"), UsageError);
    auto g = parse_grid("n_trees=10,20;max_depth=4,none;min_leaf=2");
    REQUIRE(g.size() == 4);
    CHECK(g[1].max_depth == -1);
    CHECK(g[3].n_trees == 20);
}

TEST_CASE("a cohort where nobody reaches five days exits 3") {
    fixture::TempDir dir("cli-empty");
    fixture::write_minimal_cohort(dir / "in");
    CHECK(cmd_extract({dir / "in", dir / "out", {}, false}) == exit_code::kEmptyCohort);
}

namespace {

void write_table(const std::filesystem::path& p, bool one_shift, bool constant_label) {
    std::string text = "participant_id,shift_type,unit_type,x,pos_affect,neg_affect,life_satisfaction\n";
    for (int i = 0; i < 12; ++i) {
        const char* shift = one_shift || i % 2 == 0 ? "day" : "night";
        int neg = constant_label ? 20 : 12 + i;
        text += fmt::format("P{},{},{},{},25,{},4\n", i, shift, i % 4 < 2 ? "icu" : "non_icu", i * 0.5, neg);
    }
    fixture::write_text(p, text);
}

}  // namespace

TEST_CASE("a single group exits 4") {
    fixture::TempDir dir("cli-group");
    write_table(dir / "f.csv", true, false);
    CompareOptions c;
    c.features = dir / "f.csv";
    c.out_dir = dir / "out";
    CHECK(cmd_compare(c) == exit_code::kEmptyGroup);
    c.factor = "unit";
    c.within = "night";
    CHECK(cmd_compare(c) == exit_code::kEmptyGroup);
}

TEST_CASE("compare writes one table per stratum") {
    fixture::TempDir dir("cli-compare");
    write_table(dir / "f.csv", false, false);
    CompareOptions c;
    c.features = dir / "f.csv";
    c.out_dir = dir / "out";
    CHECK(cmd_compare(c) == exit_code::kOk);
    CHECK(std::filesystem::exists(dir / "out" / "comparisons.csv"));
    c.factor = "unit";
    c.within = "shift";
    CHECK(cmd_compare(c) == exit_code::kOk);
    CHECK(std::filesystem::exists(dir / "out" / "comparisons_day.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "comparisons_night.csv"));
    c.factor = "shift";
    CHECK(cmd_compare(c) == exit_code::kUsage);
    c.factor = "color";
    c.within.clear();
    CHECK(cmd_compare(c) == exit_code::kUsage);
}

TEST_CASE("a constant label exits 5") {
    fixture::TempDir dir("cli-label");
    write_table(dir / "f.csv", false, true);
    PredictOptions p;
    p.features = dir / "f.csv";
    p.out = dir / "r.json";
    p.folds = 2;
    p.grid = "n_trees=5;max_depth=2;min_leaf=1";
    CHECK(cmd_predict(p) == exit_code::kDegenerateLabel);
    p.label = "mood";
    CHECK(cmd_predict(p) == exit_code::kUsage);
}

TEST_CASE("predict writes a readable report") {
    fixture::TempDir dir("cli-predict");
    write_table(dir / "f.csv", false, false);
    PredictOptions p;
    p.features = dir / "f.csv";
    p.out = dir / "r.json";
    p.folds = 3;
    p.grid = "n_trees=5;max_depth=2;min_leaf=1";
    REQUIRE(cmd_predict(p) == exit_code::kOk);
    auto s = read_report_json(p.out);
    CHECK(s.label == "neg_affect");
    CHECK(s.importances.size() == 1);
}

TEST_CASE("the binary maps flags to exit codes") {
    fixture::TempDir dir("cli-bin");
    CHECK(run_binary("--help") == 0);
    CHECK(run_binary("") == 2);
    CHECK(run_binary("frobnicate") == 2);
    CHECK(run_binary("extract --in " + (dir / "missing").string() + " --out " + (dir / "o").string()) == 2);
    fixture::write_text(dir / "spec.txt", kSmallSpec);
    CHECK(run_binary("simulate --spec " + (dir / "spec.txt").string() + " --out " + (dir / "c").string()) == 0);
    CHECK(std::filesystem::exists(dir / "c" / "recordings.jsonl"));
}
