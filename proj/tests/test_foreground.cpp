#include <doctest.h>

#include "fixtures.hpp"
#include "shiftspeech/foreground.hpp"

using namespace shiftspeech;

TEST_CASE("threshold filter is inclusive at the threshold") {
    auto f = ForegroundFilter::threshold();
    CHECK(f(fixture::frame(5, 60, 1, 0.5)));
    CHECK_FALSE(f(fixture::frame(5, 60, 1, 0.4999)));
    CHECK(f.kind() == ForegroundFilter::Kind::ThresholdBaseline);
    CHECK(ForegroundFilter::threshold(0.9)(fixture::frame(5, 60, 1, 0.95)));
    CHECK_FALSE(ForegroundFilter::threshold(0.9)(fixture::frame(5, 60, 1, 0.85)));
}

TEST_CASE("threshold filter ignores precomputed flags") {
    auto fr = fixture::frame(5, 60, 1, 0.9);
    fr.foreground = false;
    CHECK(ForegroundFilter::threshold()(fr));
}

TEST_CASE("external scores trust the flag and fall back to the threshold") {
    auto f = ForegroundFilter::external();
    auto yes = fixture::frame(5, 60, 1, 0.1);
    yes.foreground = true;
    auto no = fixture::frame(5, 60, 1, 0.9);
    no.foreground = false;
    CHECK(f(yes));
    CHECK_FALSE(f(no));
    CHECK(f(fixture::frame(5, 60, 1, 0.7)));
    CHECK_FALSE(f(fixture::frame(5, 60, 1, 0.2)));
}

TEST_CASE("filtering keeps order and validity needs 200 frames") {
    auto r = fixture::recording("A", fixture::day0(), 3, 0);
    for (int i = 0; i < 300; ++i) r.frames.push_back(fixture::frame(i, 60, 1, i % 3 == 0 ? 0.2 : 0.8));
    auto kept = filter_frames(r, ForegroundFilter::threshold());
    CHECK(kept.frames.size() == 200);
    CHECK(kept.minute_index == 3);
    for (std::size_t i = 1; i < kept.frames.size(); ++i)
        CHECK(kept.frames[i - 1].log_pitch < kept.frames[i].log_pitch);
    CHECK(is_valid_recording(kept));
    kept.frames.pop_back();
    CHECK_FALSE(is_valid_recording(kept));
    CHECK(is_valid_recording(kept, 199));
}
