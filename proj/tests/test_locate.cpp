#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "shiftspeech/locate.hpp"

using namespace shiftspeech;

namespace {

HubTable hubs() {
    return HubTable({{"ns", HubCategory::NursingStation},
                     {"pat", HubCategory::PatientRoom},
                     {"lounge", HubCategory::Lounge},
                     {"med", HubCategory::MedicineRoom}});
}

RssiObservation obs(int minute, const std::string& hub, int rssi) {
    return {"P1", fixture::day0(), minute, hub, rssi};
}

}  // namespace

TEST_CASE("strongest hub above the floor wins the minute") {
    std::vector<RssiObservation> o{obs(0, "ns", 170), obs(0, "pat", 160), obs(1, "ns", 149), obs(2, "med", 150),
                                   obs(3, "lounge", 155), obs(3, "pat", 181)};
    auto tl = estimate_timeline(o, hubs());
    CHECK(tl.participant_id == "P1");
    CHECK(tl.slots[0] == Location::NursingStation);
    CHECK(tl.slots[1] == Location::OutsideUnit);
    CHECK(tl.slots[2] == Location::LoungeMed);
    CHECK(tl.slots[3] == Location::PatientRoom);
    CHECK(tl.slots[4] == Location::OutsideUnit);
    CHECK(location_of(tl, 0) == Location::NursingStation);
}

TEST_CASE("ties prefer patient room, then nursing station") {
    std::vector<RssiObservation> o{obs(0, "ns", 170), obs(0, "pat", 170), obs(1, "lounge", 165), obs(1, "ns", 165),
                                   obs(2, "med", 160), obs(2, "lounge", 160)};
    auto tl = estimate_timeline(o, hubs());
    CHECK(tl.slots[0] == Location::PatientRoom);
    CHECK(tl.slots[1] == Location::NursingStation);
    CHECK(tl.slots[2] == Location::LoungeMed);
}

TEST_CASE("floor is a parameter") {
    std::vector<RssiObservation> o{obs(0, "ns", 145)};
    CHECK(estimate_timeline(o, hubs()).slots[0] == Location::OutsideUnit);
    CHECK(estimate_timeline(o, hubs(), 140).slots[0] == Location::NursingStation);
}

TEST_CASE("out-of-window minutes are ignored and lookups are bounds-checked") {
    std::vector<RssiObservation> o{obs(-3, "ns", 170), obs(720, "ns", 170)};
    auto tl = estimate_timeline(o, hubs());
    for (auto s : tl.slots) CHECK(s == Location::OutsideUnit);
    CHECK_THROWS_AS(location_of(tl, 720), OutOfRange);
    CHECK_THROWS_AS(location_of(tl, -1), OutOfRange);
}

TEST_CASE("unknown hubs are rejected") {
    std::vector<RssiObservation> o{obs(0, "ghost", 170)};
    CHECK_THROWS_AS(estimate_timeline(o, hubs()), UnknownHub);
}

TEST_CASE("input order does not change the timeline") {
    std::mt19937 rng(3);
    const char* ids[] = {"ns", "pat", "lounge", "med"};
    std::vector<RssiObservation> o;
    for (int i = 0; i < 400; ++i)
        o.push_back(obs(static_cast<int>(rng() % 60), ids[rng() % 4], 140 + static_cast<int>(rng() % 50)));
    auto base = estimate_timeline(o, hubs());
    for (int k = 0; k < 5; ++k) {
        std::shuffle(o.begin(), o.end(), rng);
        CHECK(estimate_timeline(o, hubs()) == base);
    }
}

TEST_CASE("timeline export round-trips") {
    fixture::TempDir dir("locate");
    std::vector<RssiObservation> o{obs(0, "ns", 170), obs(5, "pat", 170), obs(719, "med", 170)};
    std::vector<LocationTimeline> tls{estimate_timeline(o, hubs())};
    tls.push_back(fixture::timeline(Location::NursingStation));
    tls.back().participant_id = "P2";
    write_timelines_csv(dir / "t.csv", tls);
    auto back = read_timelines_csv(dir / "t.csv");
    CHECK(back == tls);
}
