#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "shiftspeech/arousal.hpp"

using namespace shiftspeech;

TEST_CASE("percentile score examples") {
    std::vector<double> pool{1, 2, 3, 4};
    CHECK(percentile_score(0, pool) == -1.0);
    CHECK(percentile_score(5, pool) == 1.0);
    CHECK(percentile_score(2.5, pool) == 0.0);
    CHECK(percentile_score(2, pool) == doctest::Approx(-0.25));
    std::vector<double> same{3, 3, 3};
    CHECK(percentile_score(3, same) == 0.0);
    std::vector<double> empty;
    CHECK_THROWS_AS(percentile_score(1, empty), EmptyPool);
}

TEST_CASE("percentile score matches a linear count") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> v(0, 20);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> pool(1 + rng() % 40);
        for (auto& x : pool) x = v(rng) * 0.5;
        std::sort(pool.begin(), pool.end());
        double x = v(rng) * 0.5;
        double p = percentile_score(x, pool);
        CHECK(p == doctest::Approx(oracle::percentile(x, pool)).epsilon(1e-12));
        CHECK(p >= -1.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("neutral model pools every frame and needs each feature") {
    auto d = fixture::day0();
    std::vector<RecordingSegment> recs{fixture::recording("A", d, 0, 3, 0.0), fixture::recording("A", d, 1, 2, 1.0)};
    recs[1].frames[0].log_pitch = std::nan("");
    auto m = build_neutral(recs);
    CHECK(m.pool(ProsodicFeature::Intensity).size() == 5);
    CHECK(m.pool(ProsodicFeature::LogPitch).size() == 4);
    CHECK(std::is_sorted(m.pool(ProsodicFeature::HfLfRatio).begin(), m.pool(ProsodicFeature::HfLfRatio).end()));

    for (auto& r : recs)
        for (auto& f : r.frames) f.log_pitch = std::nan("");
    CHECK_THROWS_AS(build_neutral(recs), InsufficientData);
    std::vector<RecordingSegment> none;
    CHECK_THROWS_AS(build_neutral(none), InsufficientData);
}

TEST_CASE("recording medians skip unvoiced frames for pitch") {
    auto r = fixture::recording("A", fixture::day0(), 0, 0);
    r.frames = {fixture::frame(1, 10, 0.5), fixture::frame(3, 30, 1.5), fixture::frame(std::nan(""), 20, 1.0),
                fixture::frame(2, 40, 2.0)};
    auto m = recording_medians(r);
    CHECK(*m[0] == 2.0);
    CHECK(*m[1] == 25.0);
    CHECK(*m[2] == 1.25);
    for (auto& f : r.frames) f.log_pitch = std::nan("");
    CHECK_FALSE(recording_medians(r)[0].has_value());
}

TEST_CASE("unvoiced recordings score neutral pitch") {
    auto d = fixture::day0();
    std::vector<RecordingSegment> recs{fixture::recording("A", d, 0, 4, 0.0), fixture::recording("A", d, 1, 4, 2.0)};
    auto model = build_neutral(recs);
    auto quiet = fixture::recording("A", d, 2, 4, 5.0);
    for (auto& f : quiet.frames) f.log_pitch = std::nan("");
    auto p = score_recording(quiet, model);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 1.0);
    CHECK(p[2] == 1.0);
}

TEST_CASE("fusion weights are unit-norm with the documented fallback") {
    std::vector<ScoreTriple> s{{-0.5, -0.4, 0.1}, {0.0, 0.1, 0.1}, {0.5, 0.6, 0.1}};
    auto w = fusion_weights(s);
    CHECK(w.r[2] == 0.0);
    CHECK(w.w[2] == 0.0);
    CHECK(w.r[0] == doctest::Approx(1.0));
    double norm = std::sqrt(w.w[0] * w.w[0] + w.w[1] * w.w[1] + w.w[2] * w.w[2]);
    CHECK(norm == doctest::Approx(1.0));
    CHECK_FALSE(w.fallback);

    std::vector<ScoreTriple> flat{{0.2, 0.3, 0.1}, {0.2, 0.3, 0.1}};
    auto u = fusion_weights(flat);
    CHECK(u.fallback);
    for (double x : u.w) CHECK(x == doctest::Approx(1.0 / std::sqrt(3.0)));

    std::vector<ScoreTriple> one{{0.1, 0.2, 0.3}};
    CHECK_THROWS_AS(fusion_weights(one), TooFewRecordings);
}

TEST_CASE("ratios use strict inequalities") {
    std::vector<double> fused{0.25, 0.26, -0.25, -0.3, 0.0};
    auto r = arousal_ratios(fused);
    CHECK(r.pos == doctest::Approx(0.2));
    CHECK(r.neg == doctest::Approx(0.2));
    CHECK(r.pos + r.neg <= 1.0);
    std::vector<double> none;
    CHECK_THROWS_AS(arousal_ratios(none), EmptyInput);
}

TEST_CASE("rating a speaker is invariant to a per-speaker offset") {
    auto d = fixture::day0();
    std::mt19937 rng(9);
    std::normal_distribution<double> n(0, 1);
    std::vector<RecordingSegment> recs;
    for (int k = 0; k < 8; ++k) {
        auto r = fixture::recording("A", d, k * 3, 0);
        double level = n(rng);
        for (int i = 0; i < 30; ++i) r.frames.push_back(fixture::frame(5 + level + n(rng), 60 + 2 * level + n(rng), 1 + n(rng) * 0.1 + level));
        recs.push_back(r);
    }
    auto shifted = recs;
    for (auto& r : shifted)
        for (auto& f : r.frames) {
            f.log_pitch += 0.7;
            f.intensity += 12.0;
            f.hf_lf_ratio += 3.0;
        }
    auto a = rate_speaker(recs);
    auto b = rate_speaker(shifted);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].fused == doctest::Approx(b[i].fused));
        CHECK(a[i].fused >= -std::sqrt(3.0) - 1e-12);
        CHECK(a[i].fused <= std::sqrt(3.0) + 1e-12);
    }
}

TEST_CASE("single-recording speakers get uniform weights") {
    std::vector<RecordingSegment> recs{fixture::recording("A", fixture::day0(), 0, 5)};
    FusionWeights w;
    auto rated = rate_speaker(recs, &w);
    REQUIRE(rated.size() == 1);
    CHECK(w.fallback);
    CHECK(rated[0].fused == 0.0);
}

TEST_CASE("arousal csv round-trips") {
    fixture::TempDir dir("arousal");
    std::vector<RatedRecording> rows{{"A", fixture::day0(), 3, {0.1, -0.25, 1.0 / 3.0}, 0.123456789},
                                     {"B", fixture::day0().plus_days(2), 719, {-1, 0, 1}, -0.5}};
    write_arousal_csv(dir / "a.csv", rows);
    CHECK(read_arousal_csv(dir / "a.csv") == rows);
}
