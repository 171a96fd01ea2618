#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "shiftspeech/sessionize.hpp"

using namespace shiftspeech;

TEST_CASE("adjacent minutes form one session") {
    std::vector<int> m{0, 1, 4};
    auto s = build_sessions(m, fixture::timeline());
    REQUIRE(s.size() == 2);
    CHECK(s[0].start() == 0);
    CHECK(s[0].duration_min() == 2);
    CHECK(s[1].start() == 4);
    CHECK(s[1].duration_min() == 1);
    CHECK(inter_session_times(s) == std::vector<double>{2.0});
    CHECK(gt1min_session_ratio(s) == doctest::Approx(0.5));
}

TEST_CASE("duplicates collapse and order does not matter") {
    std::vector<int> a{5, 3, 4, 4, 10, 9};
    auto s = build_sessions(a, fixture::timeline());
    REQUIRE(s.size() == 2);
    CHECK(s[0].minute_indices == std::vector<int>{3, 4, 5});
    CHECK(s[1].minute_indices == std::vector<int>{9, 10});
    CHECK(inter_session_times(s) == std::vector<double>{3.0});
}

TEST_CASE("empty input gives no sessions and the ratio refuses it") {
    std::vector<int> none;
    auto s = build_sessions(none, fixture::timeline());
    CHECK(s.empty());
    CHECK(inter_session_times(s).empty());
    CHECK_THROWS_AS(gt1min_session_ratio(s), EmptyInput);
    CHECK_THROWS_AS(session_occurrence_rate(s, Location::NursingStation), EmptyInput);
}

TEST_CASE("minutes outside the shift are rejected") {
    std::vector<int> bad{3, 720};
    CHECK_THROWS_AS(build_sessions(bad, fixture::timeline()), OutOfRange);
    std::vector<int> neg{-1};
    CHECK_THROWS_AS(build_sessions(neg, fixture::timeline()), OutOfRange);
}

TEST_CASE("sessions agree with a run scan on random minute sets") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> m;
        const int n = static_cast<int>(rng() % 80);
        for (int i = 0; i < n; ++i) m.push_back(static_cast<int>(rng() % 720));
        auto got = build_sessions(m, fixture::timeline());
        auto want = oracle::sessions(m);
        REQUIRE(got.size() == want.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].start() == want[i].first);
            CHECK(got[i].duration_min() == want[i].second);
            total += got[i].minute_indices.size();
            if (i > 0) CHECK(got[i].start() >= got[i - 1].last() + 2);
        }
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        CHECK(total == m.size());
        for (double t : inter_session_times(got)) CHECK(t >= 1.0);
    }
}

TEST_CASE("location minutes and occurrence rates follow the timeline") {
    auto tl = fixture::timeline(Location::NursingStation);
    for (int m = 10; m < 13; ++m) tl.slots[m] = Location::PatientRoom;
    std::vector<int> minutes{9, 10, 11, 12, 30};
    auto s = build_sessions(minutes, tl);
    REQUIRE(s.size() == 2);
    CHECK(s[0].minutes_at(Location::PatientRoom) == 3);
    CHECK(s[0].minutes_at(Location::NursingStation) == 1);
    CHECK(dominant_location(s[0]) == Location::PatientRoom);
    CHECK(dominant_location(s[1]) == Location::NursingStation);
    CHECK(session_occurrence_rate(s, Location::PatientRoom) == doctest::Approx(3.0 / 5.0));
    CHECK(session_occurrence_rate(s, Location::NursingStation) == doctest::Approx(2.0 / 5.0));
    CHECK(session_occurrence_rate(s, Location::OutsideUnit) == 0.0);
    double total = 0;
    for (auto l : kAllLocations) total += session_occurrence_rate(s, l);
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("dominant location ties follow the priority order") {
    auto tl = fixture::timeline(Location::NursingStation);
    tl.slots[1] = Location::PatientRoom;
    std::vector<int> minutes{0, 1};
    auto s = build_sessions(minutes, tl);
    CHECK(dominant_location(s[0]) == Location::PatientRoom);
}

TEST_CASE("sessions csv round-trips") {
    fixture::TempDir dir("sessions");
    auto tl = fixture::timeline(Location::LoungeMed);
    tl.slots[101] = Location::PatientRoom;
    std::vector<int> minutes{100, 101, 102, 300, 719};
    auto s = build_sessions(minutes, tl);
    write_sessions_csv(dir / "s.csv", s);
    CHECK(read_sessions_csv(dir / "s.csv") == s);
}
