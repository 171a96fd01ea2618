// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "shiftspeech/forest.hpp"
#include "shiftspeech/pipeline.hpp"
#include "shiftspeech/simgen.hpp"

using namespace shiftspeech;

namespace {

const Cohort& bench_cohort() {
    static const Cohort c = [] {
        CohortSpec s;
        s.n_per_cell = 3;
        s.n_shifts = 5;
        s.short_participant_fraction = 0;
        return generate_cohort(s);
    }();
    return c;
}

struct Samples {
    Matrix x;
    std::vector<int> y;
};

const Samples& bench_samples() {
    static const Samples s = [] {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g(0, 1);
        Samples out;
        for (int i = 0; i < 200; ++i) {
            std::vector<double> row(40);
            for (auto& v : row) v = g(rng);
            out.y.push_back(row[0] + 0.5 * row[1] > 0 ? 1 : 0);
            out.x.push_back(std::move(row));
        }
        return out;
    }();
    return s;
}

void BM_ExtractParallel(benchmark::State& st) {
    bench_cohort();  // build outside the timed loop
    for (auto _ : st) benchmark::DoNotOptimize(extract_cohort(bench_cohort(), ExtractionConfig{}));
}

void BM_ExtractSerial(benchmark::State& st) {
    bench_cohort();
    for (auto _ : st) benchmark::DoNotOptimize(extract_cohort_serial(bench_cohort(), ExtractionConfig{}));
}

void BM_ForestParallel(benchmark::State& st) {
    ForestParams p;
    p.n_trees = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(train_forest(bench_samples().x, bench_samples().y, p, 7));
}

void BM_ForestSerial(benchmark::State& st) {
    ForestParams p;
    p.n_trees = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(train_forest_serial(bench_samples().x, bench_samples().y, p, 7));
}

}  // namespace

BENCHMARK(BM_ExtractParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestParallel)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestSerial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
