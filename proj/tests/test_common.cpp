#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "shiftspeech/common.hpp"
#include "shiftspeech/csv.hpp"

using namespace shiftspeech;

TEST_CASE("shift dates parse, print and step by days") {
    auto d = ShiftDate::parse("2018-02-28");
    CHECK(d.to_string() == "2018-02-28");
    CHECK(d.plus_days(1).to_string() == "2018-03-01");
    CHECK(ShiftDate::parse("2020-02-28").plus_days(1).to_string() == "2020-02-29");
    CHECK(d < d.plus_days(1));
    CHECK_THROWS_AS(ShiftDate::parse("2018-02-30"), Error);
    CHECK_THROWS_AS(ShiftDate::parse("2018-2-3"), Error);
    CHECK_THROWS_AS(ShiftDate::parse("yesterday"), Error);
    CHECK_THROWS_AS(ShiftDate::parse(""), Error);
}

TEST_CASE("enum names round-trip") {
    for (auto s : {ShiftType::Day, ShiftType::Night}) CHECK(parse_shift_type(to_string(s)) == s);
    for (auto u : {UnitType::ICU, UnitType::NonICU}) CHECK(parse_unit_type(to_string(u)) == u);
    for (auto c : {HubCategory::NursingStation, HubCategory::PatientRoom, HubCategory::Lounge, HubCategory::MedicineRoom})
        CHECK(parse_hub_category(to_string(c)) == c);
    for (auto l : kAllLocations) CHECK(parse_location(to_string(l)) == l);
    CHECK(to_string(UnitType::NonICU) == "non_icu");
    CHECK(to_string(HubCategory::Lounge) == "lounge");
    CHECK_THROWS_AS(parse_shift_type("evening"), Error);
    CHECK_THROWS_AS(parse_hub_category("NS"), Error);
}

TEST_CASE("lounge and medicine rooms share one location") {
    CHECK(location_of_hub(HubCategory::Lounge) == Location::LoungeMed);
    CHECK(location_of_hub(HubCategory::MedicineRoom) == Location::LoungeMed);
    CHECK(location_of_hub(HubCategory::PatientRoom) == Location::PatientRoom);
    CHECK(location_of_hub(HubCategory::NursingStation) == Location::NursingStation);
    CHECK(tie_priority(Location::PatientRoom) < tie_priority(Location::NursingStation));
    CHECK(tie_priority(Location::NursingStation) < tie_priority(Location::LoungeMed));
}

TEST_CASE("csv field parsing is strict") {
    CHECK(csv::parse_int("42") == 42);
    CHECK(csv::parse_int("-7") == -7);
    CHECK_THROWS(csv::parse_int("4.2"));
    CHECK_THROWS(csv::parse_int(""));
    CHECK_THROWS(csv::parse_int("12a"));
    CHECK(csv::parse_double("0.25") == 0.25);
    CHECK(csv::parse_double("1e-3") == 0.001);
    CHECK_THROWS(csv::parse_double("abc"));
    CHECK_FALSE(csv::parse_optional_double("").has_value());
    CHECK(*csv::parse_optional_double("3") == 3.0);
    auto f = csv::split("a,,b,");
    REQUIRE(f.size() == 4);
    CHECK(f[1].empty());
    CHECK(f[3].empty());
}

TEST_CASE("doubles format to the shortest round-trip text") {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -0.0, 5e-324, 123456.789}) {
        auto text = csv::format_double(v);
        CHECK(csv::parse_double(text) == v);
    }
    CHECK(csv::format_double(0.25) == "0.25");
    CHECK(csv::format_double(std::numeric_limits<double>::quiet_NaN()).empty());
    CHECK(csv::format_optional(std::nullopt).empty());
}

TEST_CASE("csv reader enforces header and field count") {
    fixture::TempDir dir("csv");
    fixture::write_text(dir / "ok.csv", "a,b\n1,2\n\n3,4\r\n");
    std::vector<std::string> seen;
    csv::read_file(dir / "ok.csv", {"a", "b"}, [&](const csv::Row& r) { seen.push_back(std::string(r.fields[1])); });
    CHECK(seen == std::vector<std::string>{"2", "4"});

    fixture::write_text(dir / "hdr.csv", "a,c\n1,2\n");
    CHECK_THROWS_AS(csv::read_file(dir / "hdr.csv", {"a", "b"}, [](const csv::Row&) {}), MalformedRow);

    fixture::write_text(dir / "width.csv", "a,b\n1,2,3\n");
    CHECK_THROWS_AS(csv::read_file(dir / "width.csv", {"a", "b"}, [](const csv::Row&) {}), MalformedRow);
}
