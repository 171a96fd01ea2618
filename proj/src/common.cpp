#include "shiftspeech/common.hpp"

#include <charconv>

#include <fmt/format.h>

namespace shiftspeech {

std::string_view to_string(ShiftType s) { return s == ShiftType::Day ? "day" : "night"; }

std::string_view to_string(UnitType u) { return u == UnitType::ICU ? "icu" : "non_icu"; }

std::string_view to_string(HubCategory c) {
    switch (c) {
        case HubCategory::NursingStation: return "ns";
        case HubCategory::PatientRoom: return "pat";
        case HubCategory::Lounge: return "lounge";
        case HubCategory::MedicineRoom: return "med";
    }
    return "?";
}

std::string_view to_string(Location l) {
    switch (l) {
        case Location::NursingStation: return "ns";
        case Location::PatientRoom: return "pat";
        case Location::LoungeMed: return "loungemed";
        case Location::OutsideUnit: return "outside";
    }
    return "?";
}

ShiftType parse_shift_type(std::string_view s) {
    if (s == "day") return ShiftType::Day;
    if (s == "night") return ShiftType::Night;
    throw Error(fmt::format("bad shift_type '{}'", s));
}

UnitType parse_unit_type(std::string_view s) {
    if (s == "icu") return UnitType::ICU;
    if (s == "non_icu") return UnitType::NonICU;
    throw Error(fmt::format("bad unit_type '{}'", s));
}

HubCategory parse_hub_category(std::string_view s) {
    if (s == "ns") return HubCategory::NursingStation;
    if (s == "pat") return HubCategory::PatientRoom;
    if (s == "lounge") return HubCategory::Lounge;
    if (s == "med") return HubCategory::MedicineRoom;
    throw Error(fmt::format("bad location_category '{}'", s));
}

Location parse_location(std::string_view s) {
    for (Location l : kAllLocations)
        if (to_string(l) == s) return l;
    throw Error(fmt::format("bad location '{}'", s));
}

Location location_of_hub(HubCategory c) noexcept {
    switch (c) {
        case HubCategory::NursingStation: return Location::NursingStation;
        case HubCategory::PatientRoom: return Location::PatientRoom;
        case HubCategory::Lounge:
        case HubCategory::MedicineRoom: return Location::LoungeMed;
    }
    return Location::OutsideUnit;
}

int tie_priority(Location l) noexcept {
    switch (l) {
        case Location::PatientRoom: return 0;
        case Location::NursingStation: return 1;
        case Location::LoungeMed: return 2;
        case Location::OutsideUnit: return 3;
    }
    return 4;
}

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

ShiftDate ShiftDate::parse(std::string_view text) {
    using namespace std::chrono;
    unsigned y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_uint(text.substr(0, 4), y) ||
        !parse_uint(text.substr(5, 2), m) || !parse_uint(text.substr(8, 2), d))
        throw Error(fmt::format("bad date '{}' (want YYYY-MM-DD)", text));
    year_month_day ymd{year{static_cast<int>(y)}, month{m}, day{d}};
    if (!ymd.ok()) throw Error(fmt::format("invalid calendar date '{}'", text));
    return ShiftDate(sys_days{ymd});
}

std::string ShiftDate::to_string() const {
    std::chrono::year_month_day ymd{days_};
    return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

}  // namespace shiftspeech
