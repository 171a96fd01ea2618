#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "shiftspeech/common.hpp"
#include "shiftspeech/predict.hpp"

using namespace shiftspeech;

TEST_CASE("labels split strictly above the median") {
    std::vector<double> v{10, 20, 30, 40};
    CHECK(binarize_label(v) == std::vector<int>{0, 0, 1, 1});
    std::vector<double> odd{5, 1, 3};
    CHECK(binarize_label(odd) == std::vector<int>{1, 0, 0});
    std::vector<double> tied{1, 1, 1, 2};
    CHECK(binarize_label(tied) == std::vector<int>{0, 0, 0, 1});
    std::vector<double> flat{3, 3, 3};
    CHECK_THROWS_AS(binarize_label(flat), DegenerateLabel);
    std::vector<double> top{1, 2, 2, 2};
    CHECK_THROWS_AS(binarize_label(top), DegenerateLabel);
    std::vector<double> one{1};
    CHECK_THROWS_AS(binarize_label(one), EmptyInput);
}

TEST_CASE("z-normalisation centres columns and zeroes constants") {
    Matrix x{{1, 5}, {2, 5}, {3, 5}};
    auto [z, p] = znormalize(x);
    CHECK(z[0][0] == doctest::Approx(-std::sqrt(1.5)));
    CHECK(z[1][0] == doctest::Approx(0.0));
    CHECK(z[2][1] == 0.0);
    CHECK(p.constant[1]);
    CHECK(p.std[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
    Matrix fresh{{4, 9}};
    auto applied = p.apply(fresh);
    CHECK(applied[0][0] == doctest::Approx(2.0 / std::sqrt(2.0 / 3.0)));
    CHECK(applied[0][1] == 0.0);
    Matrix single{{1, 2}};
    CHECK_THROWS_AS(znormalize(single), TooFewSamples);
}

TEST_CASE("z-normalised columns have zero mean and unit std") {
    std::mt19937 rng(41);
    std::normal_distribution<double> g(50, 20);
    Matrix x(37, std::vector<double>(4));
    for (auto& r : x)
        for (auto& v : r) v = g(rng);
    auto z = znormalize(x).first;
    for (std::size_t j = 0; j < 4; ++j) {
        double m = 0, ss = 0;
        for (const auto& r : z) m += r[j];
        m /= static_cast<double>(z.size());
        for (const auto& r : z) ss += (r[j] - m) * (r[j] - m);
        CHECK(std::abs(m) < 1e-12);
        CHECK(std::sqrt(ss / static_cast<double>(z.size())) == doctest::Approx(1.0));
    }
}

TEST_CASE("micro-F1 over both classes equals accuracy") {
    std::vector<int> p{1, 0, 1, 1}, t{1, 0, 0, 1};
    CHECK(micro_f1(p, t) == doctest::Approx(0.75));
    std::mt19937 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> a(1 + rng() % 30), b(a.size());
        for (auto& v : a) v = static_cast<int>(rng() % 2);
        for (auto& v : b) v = static_cast<int>(rng() % 2);
        CHECK(micro_f1(a, b) == doctest::Approx(oracle::micro_f1(a, b)));
        CHECK(micro_f1(a, b) == doctest::Approx(micro_f1(b, a)));
    }
    std::vector<int> short_{1};
    CHECK_THROWS_AS(micro_f1(p, short_), LengthMismatch);
    std::vector<int> none;
    CHECK_THROWS_AS(micro_f1(none, none), EmptyInput);
}

TEST_CASE("stratified folds balance classes and are seeded") {
    std::vector<int> y;
    for (int i = 0; i < 23; ++i) y.push_back(i < 13 ? 0 : 1);
    auto f = stratified_folds(y, 5, 3);
    REQUIRE(f.size() == y.size());
    std::array<std::array<int, 2>, 5> counts{};
    for (std::size_t i = 0; i < y.size(); ++i) {
        REQUIRE(f[i] >= 0);
        REQUIRE(f[i] < 5);
        ++counts[f[i]][y[i]];
    }
    int lo = 100, hi = 0;
    for (auto& c : counts) {
        CHECK(c[0] >= 2);
        CHECK(c[0] <= 3);
        CHECK(c[1] == 2);
        lo = std::min(lo, c[0] + c[1]);
        hi = std::max(hi, c[0] + c[1]);
    }
    CHECK(hi - lo <= 1);
    CHECK(stratified_folds(y, 5, 3) == f);
    CHECK(stratified_folds(y, 5, 4) != f);
    std::vector<int> few{0, 0, 0, 1};
    CHECK_THROWS_AS(stratified_folds(few, 2, 0), TooFewSamples);
}

TEST_CASE("default grid is the documented 27 configs") {
    auto g = default_grid();
    CHECK(g.size() == 27);
    CHECK(g.front().n_trees == 100);
    CHECK(g.front().max_depth == 4);
    CHECK(g.back().n_trees == 400);
    CHECK(g.back().max_depth == -1);
    CHECK(g.back().min_leaf == 5);
}

namespace {

struct Problem {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> cols{"signal", "noise_a", "noise_b"};
};

Problem problem() {
    std::mt19937 rng(47);
    std::normal_distribution<double> g(0, 1);
    Problem p;
    for (int i = 0; i < 40; ++i) {
        int c = i % 2;
        p.x.push_back({3.0 * c + g(rng), g(rng), g(rng)});
        p.y.push_back(c);
    }
    return p;
}

std::vector<ForestParams> small_grid() {
    ForestParams a, b;
    a.n_trees = 20;
    a.max_depth = 2;
    b.n_trees = 20;
    b.min_leaf = 3;
    return {a, b};
}

}  // namespace

TEST_CASE("cross-validation is deterministic and finds the signal") {
    auto p = problem();
    auto r1 = cross_validate(p.x, p.y, p.cols, small_grid(), 4, 7, "demo");
    auto r2 = cross_validate(p.x, p.y, p.cols, small_grid(), 4, 7, "demo");
    REQUIRE(r1.grid.size() == 2);
    CHECK(r1.grid[0].micro_f1 == r2.grid[0].micro_f1);
    CHECK(r1.grid[1].fold_f1 == r2.grid[1].fold_f1);
    CHECK(r1.grid[0].fold_f1.size() == 4);
    CHECK(r1.best().micro_f1 >= r1.grid[1 - r1.best_index].micro_f1);
    CHECK(r1.best().micro_f1 > 0.7);
    REQUIRE(r1.importances.size() == 3);
    CHECK(r1.importances[0].feature == "signal");
    for (std::size_t i = 1; i < r1.importances.size(); ++i)
        CHECK(r1.importances[i - 1].weight >= r1.importances[i].weight);
    CHECK_THROWS_AS(cross_validate(p.x, p.y, p.cols, small_grid(), 41, 7), TooFewSamples);
}

TEST_CASE("report json round-trips the summary") {
    fixture::TempDir dir("predict");
    auto p = problem();
    auto r = cross_validate(p.x, p.y, p.cols, small_grid(), 4, 7, "neg_affect");
    write_report_json(dir / "report.json", r, 2);
    auto s = read_report_json(dir / "report.json");
    CHECK(s.label == "neg_affect");
    CHECK(s.best_config == r.best().params);
    CHECK(s.cv_micro_f1 == r.best().micro_f1);
    CHECK(s.seed == 7);
    REQUIRE(s.importances.size() == 2);
    CHECK(s.importances[0].feature == r.importances[0].feature);
    CHECK(s.importances[0].weight == r.importances[0].weight);
    write_report_json(dir / "again.json", r, 2);
    CHECK(fixture::slurp(dir / "report.json") == fixture::slurp(dir / "again.json"));

    fixture::write_text(dir / "bad.json", R"({"label":"x"})");
    CHECK_THROWS_AS(read_report_json(dir / "bad.json"), MalformedRow);
}
